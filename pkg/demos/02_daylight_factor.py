"""
Daylight factor in a side-lit room
==================================

The daylight factor splits indoor diffuse light into three parts: sky seen
directly through the window, light reflected by outdoor obstructions, and
light bounced around the room. This script builds a small room, walks a
sensor away from the window and shows how each part behaves.
"""

import numpy as np

from daylight.engine import PreparedScene
from daylight.scene import scene_from_dict
from daylight.sky import SkyModel, sky_luminance, zenith_luminance

###############################################################################
# The overcast sky is three times brighter at the zenith than at the horizon.
# Its zenith luminance is fixed by the horizontal illuminance it must produce.

l_z = zenith_luminance(SkyModel.CIE_OVERCAST, 10_000)
for gamma in (0, 30, 60, 90):
    print(f"elevation {gamma:2d} deg: {sky_luminance(SkyModel.CIE_OVERCAST, gamma, l_z):7.1f} cd/m2")

###############################################################################
# A 4 m x 6 m room, 2.7 m high, with a 2 m x 1.2 m window in the north wall.
# Scenes are plain dictionaries (or the equivalent YAML text).


def wall(x0, y0, x1, y1, h=2.7):
    return [[x0, y0, 0], [x1, y1, 0], [x1, y1, h], [x0, y0, h]]


doc = {
    "site": {"latitude_deg": 45.0, "longitude_deg": 5.0, "tz_offset_h": 1.0},
    "zone": {
        "surfaces": [
            {"id": "floor", "kind": "floor", "reflectance": 0.3,
             "vertices": [[0, 0, 0], [4, 0, 0], [4, 6, 0], [0, 6, 0]]},
            {"id": "ceiling", "kind": "ceiling", "reflectance": 0.8,
             "vertices": [[0, 0, 2.7], [0, 6, 2.7], [4, 6, 2.7], [4, 0, 2.7]]},
            {"id": "south", "kind": "wall", "reflectance": 0.6, "vertices": wall(0, 0, 4, 0)},
            {"id": "east", "kind": "wall", "reflectance": 0.6, "vertices": wall(4, 0, 4, 6)},
            {"id": "north", "kind": "wall", "reflectance": 0.6, "vertices": wall(4, 6, 0, 6)},
            {"id": "west", "kind": "wall", "reflectance": 0.6, "vertices": wall(0, 6, 0, 0)},
        ],
        "glazings": [{"id": "w1", "host_surface": "north", "transmittance": 0.75,
                      "vertices": [[1, 6, 0.9], [3, 6, 0.9], [3, 6, 2.1], [1, 6, 2.1]]}],
    },
}
room = scene_from_dict(doc)
prep = PreparedScene(room)

###############################################################################
# Sky component falls off quickly with depth; the internally reflected part
# is a room-wide average and stays constant.

print("\n depth    SC     ERC    IRC     DF   (percent)")
for depth in np.arange(0.5, 6.0, 1.0):
    c = prep.components((2.0, 6.0 - depth, 0.85))
    print(f"{depth:5.1f} {c.sc:6.2f} {c.erc:6.2f} {c.irc:6.2f} {c.df:6.2f}")

###############################################################################
# A tall building 8 m across the street blocks the low sky. Sky light drops,
# and part of it comes back as light reflected off the facade.

doc["obstructions"] = [{"id": "facade", "reflectance": 0.4,
                        "vertices": [[-10, 14, 0], [14, 14, 0], [14, 14, 12], [-10, 14, 12]]}]
blocked = PreparedScene(scene_from_dict(doc))
print("\nwith an opposite facade:")
for depth in (1.5, 3.5):
    a = prep.components((2.0, 6.0 - depth, 0.85))
    b = blocked.components((2.0, 6.0 - depth, 0.85))
    print(f"depth {depth}: SC {a.sc:.2f} -> {b.sc:.2f}, ERC {a.erc:.2f} -> {b.erc:.2f}, IRC {a.irc:.2f} -> {b.irc:.2f}")
