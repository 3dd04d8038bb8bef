"""Acceptance gate: one test per criterion, each at its stated tolerance."""
import time
from datetime import datetime

import numpy as np

from daylight.cli import main
from daylight.engine import PreparedScene, format_results, replay_measurements, simulate, sunspot
from daylight.geometry import (
    EDGE_TOL,
    Polygon,
    clip_polygon,
    points_in_polygon,
    polygon_area,
)
from daylight.lgi import BEAM_DAY, OVERCAST_DAY, load_lgi_scene, scene_text, synthetic_day
from daylight.scene import Glazing, Obstruction, WeatherSample, format_measurements, format_weather
from daylight.sky import SkyModel, sky_component, sky_luminance, split_flux_irc, zenith_luminance
from daylight.solar import SunState, is_daytime, solar_position

import oracles
from builders import prism_doc, scene, window_on_wall


def test_criterion_1_geometry_oracles(criterion):
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    n_poly = 10_000
    pip_mismatch = 0
    pip_checked = 0
    worst_area = 0.0
    for _ in range(n_poly):
        p2 = oracles.random_star_polygon(rng, scale=rng.uniform(0.2, 5.0))
        rot = oracles.random_rotation(rng)
        shift = rng.uniform(-10, 10, 3)
        poly = Polygon(oracles.embed(p2, rot, shift))
        ref = oracles.shoelace(p2)
        worst_area = max(worst_area, abs(polygon_area(poly) - ref) / ref)
        q2 = rng.uniform(p2.min(axis=0) - 0.1, p2.max(axis=0) + 0.1, size=(1, 2))
        if oracles.edge_distance(q2, p2)[0] <= 10 * EDGE_TOL:
            continue
        got = points_in_polygon(oracles.embed(q2, rot, shift), poly)[0] == 1
        want = oracles.winding_number(q2, p2)[0] != 0
        pip_checked += 1
        pip_mismatch += got != want

    worst_clip = 0.0
    for _ in range(20):
        while True:
            a2 = oracles.random_star_polygon(rng, scale=1.0)
            b2 = oracles.random_convex_polygon(rng, scale=0.8, center=rng.uniform(-0.3, 0.3, 2))
            rot = oracles.random_rotation(rng)
            shift = rng.uniform(-5, 5, 3)
            area = sum(polygon_area(p) for p in clip_polygon(Polygon(oracles.embed(a2, rot, shift)),
                                                             Polygon(oracles.embed(b2, rot, shift))))
            if area > 0.5:
                break
        s = rng.uniform(-1.0, 1.0, size=(1_000_000, 2))
        inside = (oracles.winding_number(s, a2) != 0) & oracles.convex_membership(s, b2)
        mc = 4.0 * inside.mean()
        worst_clip = max(worst_clip, abs(area - mc) / mc)
    elapsed = time.perf_counter() - t0

    ok = pip_mismatch == 0 and worst_area <= 1e-12 and worst_clip <= 0.01 and elapsed < 60
    criterion(1, ok, f"{pip_checked} points, {pip_mismatch} mismatches; area rel err {worst_area:.2e}; "
                     f"clip vs MC worst {100 * worst_clip:.3f}%; {elapsed:.1f} s")


def test_criterion_2_sky_normalization(criterion):
    errs = []
    for e in (1.0, 1e3, 1e5):
        l_z = zenith_luminance(SkyModel.CIE_OVERCAST, e)
        got = oracles.hemisphere_illuminance(lambda g: sky_luminance(SkyModel.CIE_OVERCAST, np.degrees(g), l_z))
        errs.append(abs(got - e) / e)
    criterion(2, max(errs) <= 1e-3, "relative errors " + ", ".join(f"{x:.1e}" for x in errs))


def _rect(o, u, v):
    return tuple(np.asarray(x, dtype=float) for x in (o, u, v))


def _sc_cases():
    unit = _rect((-0.5, 0, 0.9), (0, 0, 1), (1, 0, 0))
    wide = _rect((-1.5, 0, 0.8), (0, 0, 0.6), (3, 0, 0))
    skylight = _rect((-0.6, -0.4, 3.0), (1.2, 0, 0), (0, 0.8, 0))
    wall = _rect((-3.0, 4.0, 0.0), (6.0, 0.0, 0.0), (0.0, 0.0, 4.0))
    cases = [
        ("unit window, 1 m in, centreline", unit, 1.0, [], [(0.0, -1.0, 0.85)]),
        ("unit window behind a facing wall", unit, 1.0, [wall], [(0.0, -1.0, 0.85)]),
        ("wide low window, off-axis point", wide, 0.7, [], [(1.2, -2.0, 0.3)]),
        ("skylight", skylight, 0.9, [], [(0.4, 0.5, 0.85)]),
    ]
    lgi = load_lgi_scene()
    door = lgi.zone.glazings[0]
    v = door.polygon.vertices
    door_rect = _rect(v[0], v[3] - v[0], v[1] - v[0])
    o = lgi.obstructions[0].polygon.vertices
    overhang = _rect(o[0], o[1] - o[0], o[3] - o[0])
    cases.append(("LGI sensor line A1-A4", door_rect, door.transmittance, [overhang],
                  [tuple(p.point) for p in lgi.sensor_points()]))
    return cases


def test_criterion_3_sky_component_oracle(criterion):
    worst_mc, worst_conv, lines = 0.0, 0.0, []
    for k, (name, win, tau, obs, points) in enumerate(_sc_cases()):
        g = Glazing("g", Polygon([win[0], win[0] + win[1], win[0] + win[1] + win[2], win[0] + win[2]]), tau, "h")
        o = [Obstruction(f"o{i}", Polygon([r[0], r[0] + r[1], r[0] + r[1] + r[2], r[0] + r[2]]), 0.3)
             for i, r in enumerate(obs)]
        for j, q in enumerate(points):
            q = np.asarray(q)
            sc16 = sky_component(q, g, o, n=16)
            sc32 = sky_component(q, g, o, n=32)
            mc, err = oracles.monte_carlo_sky_component(q, win, tau, obs, n_rays=10_000_000, seed=100 * k + j)
            worst_mc = max(worst_mc, abs(sc16 - mc) / mc)
            worst_conv = max(worst_conv, abs(sc32 - sc16) / sc32)
            lines.append(f"{name}[{j}] SC {sc16:.4f} MC {mc:.4f}")
    print("\n".join(lines))
    criterion(3, worst_mc <= 0.02 and worst_conv < 0.005,
              f"worst |SC-MC|/MC {100 * worst_mc:.2f}% (1e7 rays); worst N16->N32 {100 * worst_conv:.3f}%")


def test_criterion_4_irc_worked_example(criterion):
    irc = split_flux_irc(0.85, 2.0, 50.0, 0.5, 0.3, 0.7, 39.0)
    # hand arithmetic: 100 * (1.7 / 25) * (11.7 + 3.5) / 100 = 1.0336, printed as 1.034 to three decimals
    expected = 1.7 / 25.0 * (39.0 * 0.3 + 5.0 * 0.7)
    ok = abs(irc - expected) <= 1e-6 and round(irc, 3) == 1.034
    criterion(4, ok, f"IRC {irc:.6f}% vs hand value {expected:.6f}% (3 d.p. {round(irc, 3)})")


def test_criterion_5_solar_position(criterion):
    site = load_lgi_scene().site
    worst_alt = worst_az = 0.0
    hours = 0
    for h in range(24):
        t = datetime(OVERCAST_DAY.year, OVERCAST_DAY.month, OVERCAST_DAY.day, h)
        ref_alt, ref_az = oracles.noaa_solar_position(site.latitude, site.longitude, site.tz_offset, t)
        if ref_alt <= 0:
            continue
        alt, az = solar_position(site, t)
        hours += 1
        worst_alt = max(worst_alt, abs(alt - ref_alt))
        worst_az = max(worst_az, abs((az - ref_az + 180) % 360 - 180))
    ok = hours >= 12 and worst_alt <= 0.5 and worst_az <= 0.5
    criterion(5, ok, f"{hours} daylight hours; worst altitude {worst_alt:.4f} deg, azimuth {worst_az:.4f} deg")


def test_criterion_6_lgi_findings(criterion):
    lgi = load_lgi_scene()
    overcast = simulate(lgi, synthetic_day(lgi.site, OVERCAST_DAY, "overcast"))
    rows = {(r.timestamp, r.point_id): r.e_total for r in overcast}
    day_t = sorted({r.timestamp for r in overcast
                    if is_daytime(solar_position(lgi.site, r.timestamp)[0]) and r.e_total > 0})
    a_ok = bool(day_t) and all(rows[(t, "A1")] > rows[(t, "A3")] for t in day_t)

    prep = PreparedScene(lgi)
    df = [prep.components(p.point).df for p in lgi.sensor_points()]
    b_ok = all(x > y for x, y in zip(df, df[1:]))

    mixed = synthetic_day(lgi.site, BEAM_DAY, "mixed")
    plain = simulate(lgi, mixed)
    shaded = simulate(lgi.with_options(enable_overhang_shading=True), mixed)
    never_more = all(s.e_direct <= p.e_direct for p, s in zip(plain, shaded))
    cut = [p for p, s in zip(plain, shaded) if s.e_direct < p.e_direct and 10 <= p.timestamp.hour < 14]
    c_ok = never_more and len(cut) >= 1

    detail = (f"(a) A1>A3 at {len(day_t)} daylight steps: {a_ok}; (b) DF {', '.join(f'{d:.3f}' for d in df)}: "
              f"{b_ok}; (c) overhang never adds beam: {never_more}, cuts {len(cut)} midday rows")
    criterion(6, a_ok and b_ok and c_ok, detail)


def test_criterion_7_sunspot_geometry(criterion):
    fp = [(0, 0), (10, 0), (10, 10), (0, 10)]
    room = scene(prism_doc(fp, height=3.0, glazings=[window_on_wall(fp, 2, 0.45, 0.55, 1.0, 2.0)]))
    spots = sunspot(room, SunState(45.0, 0.0))
    area_err = abs(sum(polygon_area(p) for _, p in spots) - 1.0)
    night = sunspot(room, SunState(-10.0, 0.0)) == []

    lgi = load_lgi_scene()
    shaded = lgi.with_options(enable_overhang_shading=True)
    floor = lgi.zone.floors[0].polygon
    rng = np.random.default_rng(7)
    outside = lit = 0
    for _ in range(1000):
        sun = SunState(rng.uniform(0.1, 90.0), rng.uniform(0.0, 360.0))
        for sc in (lgi, shaded):
            for _, p in sunspot(sc, sun):
                lit += 1
                outside += int(np.any(points_in_polygon(p.vertices, floor) < 0))
    ok = area_err <= 1e-9 and night and outside == 0 and lit > 0
    criterion(7, ok, f"45-degree spot area error {area_err:.1e}; night empty: {night}; "
                     f"{lit} spot pieces over 1000 suns, {outside} outside the floor")


def test_criterion_8_linearity_and_determinism(criterion):
    lgi = load_lgi_scene()
    day = synthetic_day(lgi.site, BEAM_DAY, "mixed", step_minutes=10)
    doubled = [WeatherSample(s.timestamp, 2 * s.ghi, 2 * s.dhi) for s in day]
    base = simulate(lgi, day)
    linear = all(b.e_diffuse == 2 * a.e_diffuse for a, b in zip(base, simulate(lgi, doubled)))
    same = format_results(base) == format_results(simulate(lgi, day))
    criterion(8, linear and same, f"e_diffuse doubles exactly: {linear}; repeated runs byte-identical: {same}")


def test_criterion_9_validation_loop(criterion, tmp_path, capsys):
    lgi = load_lgi_scene()
    scene_p, weather_p = tmp_path / "lgi.scene", tmp_path / "w.csv"
    results_p, meas_p, report_p = tmp_path / "r.csv", tmp_path / "m.csv", tmp_path / "rep.csv"
    scene_p.write_text(scene_text())
    weather_p.write_text(format_weather(synthetic_day(lgi.site, BEAM_DAY, "mixed")))
    assert main(["simulate", str(scene_p), str(weather_p), "--out", str(results_p)]) == 0
    meas_p.write_text(format_measurements(replay_measurements(results_p.read_text())))
    code = main(["validate", str(scene_p), str(weather_p), str(meas_p), "--out", str(report_p)])
    rows = [line.split(",") for line in report_p.read_text().splitlines()[1:]]
    zero = len(rows) == 4 and all(float(r[2]) == 0.0 and float(r[3]) == 0.0 for r in rows)
    criterion(9, code == 0 and zero, f"exit {code}; " + "; ".join(f"{r[0]} n={r[1]} mbe={r[2]} rmse={r[3]}"
                                                                  for r in rows))
