"""Command line front end.

Exit status: 0 success, 2 inconclusive (a rounding gap at or above the
trust threshold, or a verdict of ``Inconclusive``), 1 error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import io
from ._parallel import ENV_THREADS, resolve_threads
from .errors import HomotopyKitError
from .fixtures import (embedded_power_map, hopf_map, quaternion_power_map, random_gauge_map,
                       torus_degree_map)
from .homology import complex_homology, load_abstract_complex, two_cycle_basis
from .invariants import GAP_LIMIT, primary_invariant, secondary_invariant, whitehead_hopf
from .lie import calibration_info
from .lifting import MAX_SUBDIVISIONS, construct_lift, homotopy_verdict
from .maps import CosetMap, GroupMap, flag_projection, resample
from .mesh import build_s3, build_t3, subdivide

EXIT_OK, EXIT_ERROR, EXIT_INCONCLUSIVE = 0, 1, 2


def _tolerance(text):
    x = float(text)
    if not 0 < x <= GAP_LIMIT:
        raise argparse.ArgumentTypeError(f"tolerance must lie in (0, {GAP_LIMIT}]")
    return x


def build_parser():
    p = argparse.ArgumentParser(prog="homotopykit",
                                description="Homotopy classification of maps from closed 3-manifolds to flag manifolds.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-o", "--output", help="report path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default: ${ENV_THREADS} or all cores)")
    common.add_argument("--gap-tol", type=_tolerance, default=GAP_LIMIT,
                        help="rounding gap above which results are inconclusive")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("mesh", parents=[common], help="build an S^3 or T^3 mesh")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--s3", type=int, metavar="LEVEL")
    g.add_argument("--t3", type=int, metavar="N")
    s.add_argument("--subdivide", type=int, default=0)

    s = sub.add_parser("fixture", parents=[common], help="write a test map")
    s.add_argument("--mesh", required=True)
    s.add_argument("--kind", required=True,
                   choices=("hopf", "qpow", "torus", "embedded", "flag", "gauge", "identity", "constant"))
    s.add_argument("--k", type=int, default=1, help="power / Hopf invariant / torus degree")
    s.add_argument("--n", type=int, default=2, help="N of SU(N) for embedded, flag, gauge")
    s.add_argument("--seed", type=int, default=0)

    s = sub.add_parser("homology", parents=[common], help="Betti numbers and torsion")
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--mesh")
    g.add_argument("--complex", help="abstract complex JSON (sparse boundary triplets)")
    s.add_argument("--cycles", action="store_true", help="also emit a 2-cycle basis")

    for name, helptext in (("primary", "flux matrix of a coset map"),
                           ("secondary", "calibrated WZ integral of a group map"),
                           ("hopf", "Whitehead-integral Hopf invariant of an S^2 map")):
        s = sub.add_parser(name, parents=[common], help=helptext)
        s.add_argument("--mesh", required=True)
        s.add_argument("--map", required=True)
        if name == "secondary":
            s.add_argument("--scheme", choices=("polar", "first_order"), default=None)
            s.add_argument("--refine", type=int, default=0,
                           help="also report raw values after this many subdivisions")

    s = sub.add_parser("lift", parents=[common], help="construct u with map-b = u . map-a")
    s.add_argument("--mesh", required=True)
    s.add_argument("--map-a", required=True)
    s.add_argument("--map-b", required=True)
    s.add_argument("--lift-output", help="write the lift as a group map file")

    s = sub.add_parser("compare", parents=[common], help="homotopy verdict for two coset maps")
    s.add_argument("--mesh", required=True)
    s.add_argument("--map-a", required=True)
    s.add_argument("--map-b", required=True)
    s.add_argument("--stabilizer", action="append", default=[],
                   help="group map stabilizing map-a (repeatable)")
    s.add_argument("--max-subdivisions", type=int, default=MAX_SUBDIVISIONS,
                   help="automatic refinements before giving up (default %(default)s)")
    s.add_argument("--no-confirm", dest="confirm", action="store_false",
                   help="skip the confirming recomputation on one further subdivision")
    return p


def _emit(report, args):
    text = io.report_to_csv(report) if args.format == "csv" else io.dumps(report)
    if args.output:
        with open(args.output, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_mesh(args):
    c = build_s3(args.s3) if args.s3 is not None else build_t3(args.t3)
    for _ in range(args.subdivide):
        c = subdivide(c)
    out = io.mesh_to_json(c)
    out["id"] = c.id
    return out, EXIT_OK


def _cmd_fixture(args):
    c = io.load_mesh(args.mesh)
    kind, k, n = args.kind, args.k, args.n
    if kind == "hopf":
        m = hopf_map(c, k)
    elif kind == "qpow":
        m = quaternion_power_map(c, k)
    elif kind == "torus":
        m = torus_degree_map(c, k)
    elif kind == "embedded":
        m = embedded_power_map(c, k, n)
    elif kind == "flag":
        m = flag_projection(embedded_power_map(c, k, n))
    elif kind == "gauge":
        m = random_gauge_map(c, args.seed, n=n)
    elif kind == "identity":
        m = GroupMap.identity(c, n)
    else:
        m = CosetMap.constant(c, n)
    return io.map_to_dict(m), EXIT_OK


def _cmd_homology(args):
    if args.complex:
        mats = load_abstract_complex(io.read_json(args.complex))
        hs = complex_homology(mats)
        return {"homology": [h.to_dict() for h in hs]}, EXIT_OK
    c = io.load_mesh(args.mesh)
    hs = complex_homology([c.boundary_matrix(k) for k in (1, 2, 3)], sizes=c.counts)
    out = {"mesh": c.id, "homology": [h.to_dict() for h in hs],
           "betti": [h.betti for h in hs]}
    if args.cycles:
        out["two_cycles"] = [{"triangles": z.support,
                              "coefficients": [z.coefficients[t] for t in z.support]}
                             for z in two_cycle_basis(c)]
    return out, EXIT_OK


def _status(gap, tol):
    return EXIT_INCONCLUSIVE if gap >= tol else EXIT_OK


def _cmd_primary(args):
    c = io.load_mesh(args.mesh)
    phi = io.load_map(args.map, c)
    if not isinstance(phi, CosetMap):
        raise HomotopyKitError("primary needs a coset map")
    inv = primary_invariant(phi, strict=False, threads=args.threads)
    rep = inv.to_dict()
    rep["row_sums"] = inv.fluxes.sum(axis=1).tolist()
    return rep, _status(inv.gap, args.gap_tol)


def _calibration_report(group, scheme):
    out = []
    for n, const in zip(group.factors, group.wz_constants):
        info = calibration_info(n, scheme)
        out.append({"N": n, "nominal_constant": const, "calibration": info["calibration"],
                    "calibrated_constant": info["calibrated_constant"],
                    "extrapolation_order": info["order"]})
    return out


def _cmd_secondary(args):
    c = io.load_mesh(args.mesh)
    u = io.load_map(args.map, c)
    if not isinstance(u, GroupMap):
        raise HomotopyKitError("secondary needs a group map")
    sec = secondary_invariant(u, scheme=args.scheme, strict=False, threads=args.threads)
    rep = sec.to_dict()
    rep["scheme"] = sec.scheme
    rep["calibration_report"] = _calibration_report(u.group, sec.scheme)
    if args.refine:
        rows = [{"level": c.level, "n_tets": c.n_tets, "raw": list(sec.raw), "gap": sec.gap}]
        m, mesh = u, c
        for _ in range(args.refine):
            mesh = subdivide(mesh)
            m = resample(m, mesh)
            s2 = secondary_invariant(m, scheme=args.scheme, strict=False, threads=args.threads)
            rows.append({"level": mesh.level, "n_tets": mesh.n_tets, "raw": list(s2.raw), "gap": s2.gap})
        if args.format == "csv":
            return [dict(r, raw=";".join(repr(x) for x in r["raw"])) for r in rows], _status(sec.gap, args.gap_tol)
        rep["refinement"] = rows
    return rep, _status(sec.gap, args.gap_tol)


def _cmd_hopf(args):
    c = io.load_mesh(args.mesh)
    phi = io.load_map(args.map, c)
    if not isinstance(phi, CosetMap):
        raise HomotopyKitError("hopf needs a coset map")
    h = whitehead_hopf(phi, threads=args.threads)
    gap = abs(h - round(h))
    return {"raw": [h], "value": [int(round(h))], "gap": gap, "calibration": [1.0]}, \
        _status(gap, args.gap_tol)


def _cmd_lift(args):
    c = io.load_mesh(args.mesh)
    phi, psi = io.load_map(args.map_a, c), io.load_map(args.map_b, c)
    res = construct_lift(phi, psi, threads=args.threads)
    if args.lift_output:
        io.save_json(io.map_to_dict(res.u), args.lift_output)
    return res.to_dict(), EXIT_OK


def _cmd_compare(args):
    c = io.load_mesh(args.mesh)
    phi, psi = io.load_map(args.map_a, c), io.load_map(args.map_b, c)
    gens = [io.load_map(p, c) for p in args.stabilizer]
    v = homotopy_verdict(phi, psi, gens, max_subdivisions=args.max_subdivisions,
                         confirm=args.confirm, threads=args.threads)
    rep = v.to_dict()
    if v.tag != "Inconclusive" and any(g >= args.gap_tol for g in v.gaps.values()):
        rep["verdict"] = "Inconclusive"
        rep["reason"] = f"a rounding gap exceeds the requested tolerance {args.gap_tol}"
    code = EXIT_INCONCLUSIVE if rep["verdict"] == "Inconclusive" else EXIT_OK
    return rep, code


COMMANDS = {"mesh": _cmd_mesh, "fixture": _cmd_fixture, "homology": _cmd_homology,
            "primary": _cmd_primary, "secondary": _cmd_secondary, "hopf": _cmd_hopf,
            "lift": _cmd_lift, "compare": _cmd_compare}


def run(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    args.threads = resolve_threads(args.threads)
    for attr in ("mesh", "map", "map_a", "map_b", "complex"):
        path = getattr(args, attr, None)
        if args.command != "mesh" and path and not os.path.exists(path):
            print(f"homotopykit: error: no such file: {path}", file=sys.stderr)
            return EXIT_ERROR
    try:
        report, code = COMMANDS[args.command](args)
    except (HomotopyKitError, ValueError) as err:
        print(f"homotopykit: error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ERROR
    _emit(report, args)
    return code


def main():  # pragma: no cover - console entry point
    sys.exit(run())


if __name__ == "__main__":  # pragma: no cover
    main()
