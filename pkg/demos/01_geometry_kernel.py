"""
Polygons in 3D: area, containment, clipping and solid angle
===========================================================

Everything the daylight engine does rests on a handful of planar polygon
operations. This script walks through them on small shapes whose answers
are easy to check by hand.
"""

import math

import numpy as np

from daylight.geometry import (
    Plane,
    Polygon,
    clip_polygon,
    point_in_polygon,
    polygon_area,
    project_polygon,
    rectangle,
    solid_angle,
    subtract_polygon,
)

###############################################################################
# A polygon is a list of coplanar vertices. Its plane is fitted once and the
# vertices are kept in a local 2D frame for the planar algorithms.

window = rectangle(origin=(0, 0, 1), edge_u=(0, 0, 1), edge_v=(1, 0, 0))
print("window area:", polygon_area(window), "m2")
print("window normal:", window.normal)

###############################################################################
# Containment has three outcomes; the boundary gets its own answer so that
# callers can decide how to treat points exactly on an edge.

for q in [(0.5, 0, 1.5), (1.0, 0, 1.5), (2.0, 0, 1.5)]:
    print(q, point_in_polygon(q, window).value)

###############################################################################
# Clipping and subtraction. An L-shaped floor clipped by a square gives
# three quarters of the square; cutting a hole out of a square leaves the rest.

ell = Polygon([(0, 0, 0), (2, 0, 0), (2, 1, 0), (1, 1, 0), (1, 2, 0), (0, 2, 0)])
square = rectangle((0.5, 0.5, 0), (1, 0, 0), (0, 1, 0))
print("L clipped by square:", sum(polygon_area(p) for p in clip_polygon(square, ell)))
hole = rectangle((0.25, 0.25, 0), (0.5, 0, 0), (0, 0.5, 0))
print("unit square minus a 0.5 m hole:",
      sum(polygon_area(p) for p in subtract_polygon(rectangle((0, 0, 0), (1, 0, 0), (0, 1, 0)), hole)))

###############################################################################
# Projection along a direction. A beam at 45 degrees through a 1 m tall window
# lands 1 m to 2 m away from the wall, and the patch keeps the window's area.

beam = np.array([0.0, -1.0, -1.0]) / math.sqrt(2)
floor = Plane(np.array([0.0, 0.0, 1.0]), 0.0)
spot = project_polygon(window, beam, floor)
print("spot y range:", spot.vertices[:, 1].min(), spot.vertices[:, 1].max(), "area:", polygon_area(spot))

###############################################################################
# Solid angle. A 1 m x 1 m plate seen from 0.5 m on its axis subtends a
# sixth of the full sphere, since six such plates form a cube around the point.

plate = rectangle((-0.5, -0.5, 0.5), (1, 0, 0), (0, 1, 0))
print("solid angle:", solid_angle((0, 0, 0), plate), "vs 4*pi/6 =", 4 * math.pi / 6)
