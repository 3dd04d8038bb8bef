"""
Simulating a day and scoring it against measurements
====================================================

The workflow for checking a model against a monitored room: feed a weather
series, simulate illuminance at the sensors, then compare with what the
sensors recorded. With no logger data at hand we make "measurements" by
perturbing a simulation, which shows what the error metrics respond to.
"""

import numpy as np

from daylight.engine import simulate, validate
from daylight.lgi import OVERCAST_DAY, load_lgi_scene, synthetic_day
from daylight.scene import Measurement

cell = load_lgi_scene()
weather = synthetic_day(cell.site, OVERCAST_DAY, "overcast")
results = simulate(cell, weather)

###############################################################################
# Under an overcast sky indoor light is a fixed fraction of outdoor diffuse
# light, so the sensor nearest the door stays brightest all day.

noon = [r for r in results if r.timestamp.hour == 12 and r.timestamp.minute == 0]
for r in noon:
    print(f"{r.point_id}: DF {r.components.df:5.2f} %  ->  {r.e_total:7.1f} lx at 12:00")

###############################################################################
# Fake measurements: the simulation scaled by 0.9 (a darker room than modelled)
# plus sensor noise. The bias shows up in MBE; noise only inflates RMSE.

rng = np.random.default_rng(0)
measured = [Measurement(r.timestamp, r.point_id, max(0.0, 0.9 * r.e_total + rng.normal(0, 5)))
            for r in results if r.e_total > 0]
report = validate(results, measured)
print(f"\n{report.matched} matched pairs, {report.unmatched} unmatched")
for pid, m in report.metrics.items():
    print(f"{pid}: MBE {m.mbe:6.1f} lx   RMSE {m.rmse:6.1f} lx   relative RMSE {100 * m.rmse_rel:4.1f} %")

###############################################################################
# The same loop runs from the shell:
#
#   daylight simulate lgi.scene weather.csv --out results.csv
#   daylight validate lgi.scene weather.csv measured.csv --out report.csv
