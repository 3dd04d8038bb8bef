"""``daylight`` command line: check, grid, simulate, validate.

Exit codes: 0 success, 1 I/O or parse failure, 2 validation or semantic failure.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
import time
from dataclasses import replace
from pathlib import Path

from .engine import (
    EngineError,
    PreparedScene,
    format_metrics,
    format_results,
    simulate,
    validate,
)
from .geometry import GeometryError, polygon_area
from .photometry import PhotometryError
from .scene import (
    GridSpec,
    Scene,
    SceneSyntaxError,
    SceneValidationError,
    SensorGrid,
    SeriesError,
    parse_measurements,
    parse_scene,
    parse_weather,
)

EXIT_OK, EXIT_IO, EXIT_INVALID = 0, 1, 2


class CliError(Exception):
    def __init__(self, message: str, code: int):
        super().__init__(message)
        self.code = code


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise CliError(f"cannot read {path}: {e.strerror or e}", EXIT_IO) from None


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text, encoding="utf-8", newline="")
    except OSError as e:
        raise CliError(f"cannot write {path}: {e.strerror or e}", EXIT_IO) from None


def _load_scene(path: str) -> Scene:
    text = _read(path)
    try:
        return parse_scene(text)
    except SceneSyntaxError as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None
    except SceneValidationError as e:
        raise CliError(f"{path}: {e}", EXIT_INVALID) from None


def _load_series(path: str, parser):
    text = _read(path)
    try:
        return parser(text)
    except SeriesError as e:
        raise CliError(f"{path}: {e}", EXIT_IO) from None


def _apply_overrides(scene: Scene, args) -> Scene:
    opts = {}
    if getattr(args, "patch_n", None) is not None:
        opts["patch_n"] = args.patch_n
    if getattr(args, "enable_overhang", False):
        opts["enable_overhang_shading"] = True
    eff = {}
    if getattr(args, "k_diffuse", None) is not None:
        eff["k_diffuse"] = args.k_diffuse
    if getattr(args, "k_beam", None) is not None:
        eff["k_beam"] = args.k_beam
    try:
        if opts:
            scene = replace(scene, options=replace(scene.options, **opts))
        if eff:
            scene = replace(scene, efficacy=replace(scene.efficacy, **eff))
        gh, gs = getattr(args, "grid_height", None), getattr(args, "grid_spacing", None)
        if gh is not None or gs is not None:
            base = scene.sensors.grid or GridSpec(0.85, 0.5)
            grid = GridSpec(gh if gh is not None else base.height, gs if gs is not None else base.spacing,
                            base.margin)
            scene = replace(scene, sensors=SensorGrid(grid=grid))
    except (ValueError, PhotometryError) as e:
        raise CliError(f"invalid override: {e}", EXIT_INVALID) from None
    return scene


def _gnuplot_script(csv_path: str, point_ids) -> str:
    lines = [
        "set datafile separator ','",
        "set xdata time",
        "set timefmt '%Y-%m-%dT%H:%M:%S'",
        "set format x '%H:%M'",
        "set ylabel 'illuminance (lx)'",
        "set key outside",
    ]
    plots = [f"'< grep \",{pid},\" {csv_path}' using 1:9 with lines title '{pid}'" for pid in point_ids]
    lines.append("plot " + ", \\\n     ".join(plots))
    return "\n".join(lines) + "\n"


def cmd_check(args) -> int:
    scene = _apply_overrides(_load_scene(args.scene), args)
    z = scene.zone
    pts = scene.sensor_points()
    print(f"scene: {args.scene}")
    print(f"site: lat {scene.site.latitude:.4f}, lon {scene.site.longitude:.4f}, "
          f"UTC{scene.site.tz_offset:+g} h, albedo {scene.site.albedo:g}")
    print(f"zone: {len(z.surfaces)} surfaces, A = {z.total_area:.4f} m2, R = {z.mean_reflectance:.4f}")
    for g in z.glazings:
        print(f"glazing {g.id}: area {polygon_area(g.polygon):.4f} m2, tau {g.transmittance:g}, host {g.host_surface}")
    print(f"obstructions: {len(scene.obstructions)}")
    print(f"sensors: {len(pts)}")
    return EXIT_OK


def cmd_grid(args) -> int:
    scene = _apply_overrides(_load_scene(args.scene), args)
    if args.edh < 0:
        raise CliError("--edh must be >= 0", EXIT_INVALID)
    pts = scene.sensor_points()
    if not pts:
        raise CliError("scene defines no sensor points or grid", EXIT_INVALID)
    prep = PreparedScene(scene)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["point_id", "x", "y", "z", "sc_pct", "erc_pct", "irc_pct", "df_pct", "e_diffuse_lux"])
    for p in pts:
        c = prep.components(p.point)
        w.writerow([p.id] + [f"{v:.4f}" for v in (p.x, p.y, p.z, c.sc, c.erc, c.irc, c.df, c.df / 100.0 * args.edh)])
    _write(args.out, buf.getvalue())
    return EXIT_OK


def _run(scene: Scene, weather):
    if not weather:
        raise CliError("weather series is empty", EXIT_INVALID)
    if not scene.sensor_points():
        raise CliError("scene defines no sensor points or grid", EXIT_INVALID)
    return simulate(scene, weather)


def cmd_simulate(args) -> int:
    scene = _apply_overrides(_load_scene(args.scene), args)
    weather = _load_series(args.weather, parse_weather)
    t0 = time.perf_counter()
    results = _run(scene, weather)
    _write(args.out, format_results(results))
    if args.emit_gnuplot and args.out not in (None, "-"):
        ids = list(dict.fromkeys(r.point_id for r in results))
        _write(str(Path(args.out).with_suffix(".gp")), _gnuplot_script(args.out, ids))
    print(f"wrote {len(results)} rows in {time.perf_counter() - t0:.2f} s", file=sys.stderr)
    return EXIT_OK


def cmd_validate(args) -> int:
    scene = _apply_overrides(_load_scene(args.scene), args)
    weather = _load_series(args.weather, parse_weather)
    measured = _load_series(args.measured, parse_measurements)
    results = _run(scene, weather)
    try:
        report = validate(results, measured, decimals=4)
    except EngineError as e:
        raise CliError(str(e), EXIT_INVALID) from None
    _write(args.out, format_metrics(report))
    print(f"matched {report.matched} pairs, {report.unmatched} measurement rows unmatched", file=sys.stderr)
    return EXIT_OK


def _common(p: argparse.ArgumentParser, grid: bool = True):
    p.add_argument("--patch-n", type=int, help="glazing patch grid size (default from scene)")
    p.add_argument("--k-diffuse", type=float, help="diffuse luminous efficacy, lm/W")
    p.add_argument("--k-beam", type=float, help="beam luminous efficacy, lm/W")
    p.add_argument("--enable-overhang", action="store_true", help="cut obstruction shadows out of sunspots")
    if grid:
        p.add_argument("--grid-height", type=float, help="replace sensors by a grid at this height (m)")
        p.add_argument("--grid-spacing", type=float, help="grid spacing (m)")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="daylight", description="Daylight-factor and sunspot illuminance engine")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="validate a scene file and print a summary")
    p.add_argument("scene")
    _common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("grid", help="daylight factors and diffuse illuminance at every sensor")
    p.add_argument("scene")
    p.add_argument("--edh", type=float, required=True, help="exterior diffuse horizontal illuminance, lx")
    p.add_argument("--out", help="output CSV (default stdout)")
    _common(p)
    p.set_defaults(func=cmd_grid)

    p = sub.add_parser("simulate", help="time-series simulation over a weather CSV")
    p.add_argument("scene")
    p.add_argument("weather")
    p.add_argument("--out", help="results CSV (default stdout)")
    p.add_argument("--emit-gnuplot", action="store_true", help="also write <out>.gp plot script")
    _common(p)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("validate", help="compare a simulation with measured illuminance")
    p.add_argument("scene")
    p.add_argument("weather")
    p.add_argument("measured")
    p.add_argument("--out", help="metrics report CSV (default stdout)")
    _common(p)
    p.set_defaults(func=cmd_validate)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CliError as e:
        print(f"daylight: {e}", file=sys.stderr)
        return e.code
    except (EngineError, GeometryError, PhotometryError, SceneValidationError) as e:
        print(f"daylight: {e}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
