"""
Sunspots and the overhang
=========================

Direct sun reaches a floor sensor only when the sensor sits inside the
patch of floor lit through the glazing. This script follows that patch
through a winter day in the bundled test cell, then turns on the overhang
shading mask to see which sensors lose their sun.
"""

from datetime import datetime, timedelta

from daylight.engine import simulate, sunspot
from daylight.geometry import polygon_area
from daylight.lgi import BEAM_DAY, load_lgi_scene, synthetic_day
from daylight.solar import SunState, solar_noon, solar_position

cell = load_lgi_scene()
shaded = cell.with_options(enable_overhang_shading=True)

###############################################################################
# In the southern winter the noon sun stands in the north, low enough to shine
# deep through the north-facing door.

noon = solar_noon(cell.site, BEAM_DAY)
print("solar noon:", noon.strftime("%H:%M:%S"))
for dh in (-3, -2, -1, 0, 1, 2, 3):
    t = noon + timedelta(hours=dh)
    sun = SunState(*solar_position(cell.site, t))
    plain = sum(polygon_area(p) for _, p in sunspot(cell, sun))
    masked = sum(polygon_area(p) for _, p in sunspot(shaded, sun))
    print(f"{t:%H:%M}  altitude {sun.altitude:5.1f}  azimuth {sun.azimuth:5.1f}  "
          f"spot {plain:5.2f} m2, with overhang {masked:5.2f} m2")

###############################################################################
# Over a synthetic day with passing clouds, count the minutes of direct sun
# at each sensor with and without the mask.

day = synthetic_day(cell.site, BEAM_DAY, "mixed")
for label, sc in (("no mask", cell), ("overhang mask", shaded)):
    sunny = {}
    for r in simulate(sc, day):
        if r.e_direct > 0:
            sunny[r.point_id] = sunny.get(r.point_id, 0) + 1
    print(f"{label:14s}", {pid: sunny.get(pid, 0) for pid in ("A1", "A2", "A3", "A4")}, "minutes of sun")

###############################################################################
# The shadow edge moves with the sun, so which sensor is shaded depends on
# the date. A higher autumn sun puts A1 under the overhang's shadow.

t = datetime(2008, 4, 20, 12, 15)
sun = SunState(*solar_position(cell.site, t))
print(f"\n{t:%Y-%m-%d %H:%M}: spot {sum(polygon_area(p) for _, p in sunspot(cell, sun)):.2f} m2 "
      f"-> {sum(polygon_area(p) for _, p in sunspot(shaded, sun)):.2f} m2 with the overhang")
