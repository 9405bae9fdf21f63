"""Batch command-line frontend.

One subcommand per library operation, JSON (default) or table output, byte
deterministic.  Exit codes: 0 success, 1 verification failure, 2 usage or
format error, 3 enumeration budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from .budget import DEFAULT_NODE_BUDGET, Budget
from .errors import (BudgetExceededError, CatalogError, FormatError,
                     ShapeError, UnsupportedError)
from . import expansion as expmod
from . import lattice as latmod
from . import numeric as nummod
from . import operators as opmod
from . import schottky as schmod
from . import theta as thetamod

CONFIG_ENV = "STABLE_THETA_CONFIG"
_CONFIG_DEFAULTS = {"bound": 2, "node_budget": DEFAULT_NODE_BUDGET,
                    "catalog_path": None, "format": "json", "threads": 1}


class RunConfig:
    """Defaults shared by all subcommands; flags override file values."""

    __slots__ = ("bound", "node_budget", "catalog_path", "format", "threads")

    def __init__(self, **kw):
        merged = dict(_CONFIG_DEFAULTS)
        for key, value in kw.items():
            if key not in merged:
                raise FormatError(f"unknown config key {key!r}")
            merged[key] = value
        self.bound = int(merged["bound"])
        self.node_budget = int(merged["node_budget"])
        self.catalog_path = merged["catalog_path"]
        self.format = merged["format"]
        self.threads = int(merged["threads"])
        if self.bound <= 0:
            raise FormatError("config bound must be positive")
        if self.node_budget <= 0 or self.threads <= 0:
            raise FormatError("config budgets and threads must be positive")
        if self.format not in ("json", "table"):
            raise FormatError(f"unknown output format {self.format!r}")


def load_config(path=None) -> RunConfig:
    """Read TOML or JSON config from `path`, the environment, or defaults."""
    path = path or os.environ.get(CONFIG_ENV)
    if not path:
        return RunConfig()
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise FormatError(f"cannot read config {path}: {exc}") from exc
    if path.endswith(".toml"):
        try:
            import tomllib
        except ImportError:
            import tomli as tomllib
        try:
            data = tomllib.loads(raw.decode("utf-8"))
        except Exception as exc:
            raise FormatError(f"bad TOML config: {exc}") from exc
    else:
        try:
            data = json.loads(raw.decode("utf-8"))
        except Exception as exc:
            raise FormatError(f"bad JSON config: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("config must be a table of settings")
    return RunConfig(**data)


def _build_parser():
    top = argparse.ArgumentParser(
        prog="stable-theta",
        description="Truncated theta expansions of even unimodular lattices, "
                    "degree-lowering operators, products and verifications.")
    sub = top.add_subparsers(dest="command", required=True)

    def common(p, *, genus=False, bound=False, out=True):
        if genus:
            p.add_argument("--genus", type=int, required=True)
        if bound:
            p.add_argument("--bound", type=int, default=None)
        if out:
            p.add_argument("--out", default=None)
        p.add_argument("--format", choices=("json", "table"), default=None)
        p.add_argument("--config", default=None)
        p.add_argument("--threads", type=int, default=None)

    lat = sub.add_parser("lattice", help="lattice catalog queries")
    latsub = lat.add_subparsers(dest="subcommand", required=True)
    p = latsub.add_parser("info", help="rank, determinant and norm counts")
    p.add_argument("--lattice", required=True)
    p.add_argument("--bound", type=int, default=None)
    common(p)

    th = sub.add_parser("theta", help="theta expansions")
    thsub = th.add_subparsers(dest="subcommand", required=True)
    p = thsub.add_parser("siegel", help="Siegel theta expansion of a lattice")
    p.add_argument("--lattice", required=True)
    common(p, genus=True, bound=True)
    p = thsub.add_parser("jacobi", help="Jacobi theta expansion of an index lattice")
    p.add_argument("--index-lattice", required=True)
    common(p, genus=True, bound=True)
    p = thsub.add_parser("sc", help="theta expansion with a characteristic matrix")
    p.add_argument("--lattice", required=True)
    p.add_argument("--c-matrix", required=True,
                   help="path to a JSON integer matrix (rank x h)")
    common(p, genus=True, bound=True)

    p = sub.add_parser("igusa", help="rank-16 theta difference expansion")
    common(p, genus=True, bound=True)

    p = sub.add_parser("diff", help="difference of two theta expansions")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    common(p, genus=True, bound=True)

    p = sub.add_parser("schottky-jacobi",
                       help="(theta_Q - theta_P) times a Jacobi theta series")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    p.add_argument("--index-lattice", required=True)
    common(p, genus=True, bound=True)

    op = sub.add_parser("op", help="degree-lowering operators")
    opsub = op.add_subparsers(dest="subcommand", required=True)
    for name, helptext in (("phi", "Siegel degree lowering"),
                           ("psi", "Jacobi degree lowering")):
        p = opsub.add_parser(name, help=helptext)
        p.add_argument("--input", required=True)
        common(p)

    p = sub.add_parser("product",
                       help="Siegel theta expansion times Jacobi theta expansion")
    p.add_argument("--lattice", required=True)
    p.add_argument("--index-lattice", required=True)
    common(p, genus=True, bound=True)

    ver = sub.add_parser("verify", help="verification reports")
    versub = ver.add_subparsers(dest="subcommand", required=True)
    p = versub.add_parser("stable", help="degree-lowering family check")
    p.add_argument("--kind", choices=("siegel", "jacobi"), required=True)
    p.add_argument("--lattice", default=None)
    p.add_argument("--index-lattice", default=None)
    p.add_argument("--max-genus", type=int, required=True)
    common(p, bound=True)
    p = versub.add_parser("singular", help="block-determinant support check")
    p.add_argument("--input", required=True)
    common(p)

    chk = sub.add_parser("check", help="pair hypotheses and numeric laws")
    chksub = chk.add_subparsers(dest="subcommand", required=True)
    p = chksub.add_parser("pair", help="rank/min-norm and norm-profile verdicts")
    p.add_argument("--p", required=True)
    p.add_argument("--q", required=True)
    common(p)
    p = chksub.add_parser("inversion", help="genus-1 inversion residual")
    p.add_argument("--lattice", required=True)
    p.add_argument("--input", required=True,
                   help="point JSON with tau_re / tau_im (1x1)")
    p.add_argument("--tol", type=float, default=1e-8)
    common(p)

    p = sub.add_parser("eval", help="evaluate an expansion at a point")
    p.add_argument("--input", required=True,
                   help='JSON {"expansion": ..., "point": ...}')
    common(p)
    return top


def _read_input(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, "r", encoding="utf-8") as fh:
        return fh.read()


def _emit(text, out):
    if out:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_expansion(exp, args, cfg):
    fmt = args.format or cfg.format
    if fmt == "json":
        _emit(expmod.serialize(exp), args.out)
        return
    lines = [f"# {exp!r}"]
    if isinstance(exp, expmod.JacobiExpansion):
        for key in exp.sorted_keys():
            lines.append(f"{expmod.key_bytes(key, exp.genus, exp.width).decode()}"
                         f"\t{exp.terms[key]}")
    else:
        for key in exp.sorted_keys():
            lines.append(f"{expmod.key_bytes(key, exp.genus).decode()}"
                         f"\t{exp.terms[key]}")
    _emit("\n".join(lines) + "\n", args.out)


def _emit_report(doc, args, cfg):
    fmt = args.format or cfg.format
    if fmt == "json":
        _emit(json.dumps(doc, separators=(", ", ": ")) + "\n", args.out)
    else:
        lines = [f"{k}\t{json.dumps(v, separators=(',', ':'))}"
                 for k, v in doc.items()]
        _emit("\n".join(lines) + "\n", args.out)


def _bound(args, cfg):
    b = args.bound if getattr(args, "bound", None) is not None else cfg.bound
    if b < 0:
        raise FormatError("bound must be nonnegative")
    return b


def _budget(cfg):
    return Budget(cfg.node_budget)


def _load_expansion_arg(path):
    return expmod.deserialize(_read_input(path))


def _run(args) -> int:
    cfg = load_config(args.config)
    if args.threads is not None:
        if args.threads <= 0:
            raise FormatError("threads must be positive")
        cfg.threads = args.threads  # accepted for interface stability; execution is sequential
    if cfg.catalog_path:
        latmod.load_catalog(cfg.catalog_path)
    cmd = args.command
    subcmd = getattr(args, "subcommand", None)

    if cmd == "lattice" and subcmd == "info":
        L = latmod.catalog_lattice(args.lattice)
        bound = args.bound if args.bound is not None else 8
        profile = latmod.count_vectors_by_norm(L, bound, budget=_budget(cfg))
        doc = {"name": args.lattice, "rank": L.rank, "det": L.det,
               "even_unimodular": latmod.is_even_unimodular(L),
               "min_norm": latmod.min_norm(L),
               "norm_counts": {str(k): v for k, v in profile.counts.items()},
               "sign_convention": latmod.SIGN_CONVENTION}
        _emit_report(doc, args, cfg)
        return 0

    if cmd == "theta" and subcmd == "siegel":
        L = latmod.catalog_lattice(args.lattice)
        exp = thetamod.siegel_theta(L, args.genus, _bound(args, cfg), _budget(cfg))
        _emit_expansion(exp, args, cfg)
        return 0

    if cmd == "theta" and subcmd == "jacobi":
        L = latmod.catalog_lattice(args.index_lattice)
        exp = thetamod.jacobi_theta(L, args.genus, _bound(args, cfg), _budget(cfg))
        _emit_expansion(exp, args, cfg)
        return 0

    if cmd == "theta" and subcmd == "sc":
        L = latmod.catalog_lattice(args.lattice)
        cmat = json.loads(_read_input(args.c_matrix))
        exp = thetamod.theta_sc(L, cmat, args.genus, _bound(args, cfg), _budget(cfg))
        _emit_expansion(exp, args, cfg)
        return 0

    if cmd == "igusa":
        exp = schmod.igusa_form(args.genus, _bound(args, cfg), _budget(cfg))
        _emit_expansion(exp, args, cfg)
        return 0

    if cmd == "diff":
        P = latmod.catalog_lattice(args.p)
        Q = latmod.catalog_lattice(args.q)
        exp = schmod.theta_difference(P, Q, args.genus, _bound(args, cfg),
                                      _budget(cfg))
        _emit_expansion(exp, args, cfg)
        return 0

    if cmd == "schottky-jacobi":
        P = latmod.catalog_lattice(args.p)
        Q = latmod.catalog_lattice(args.q)
        M = latmod.catalog_lattice(args.index_lattice)
        exp = schmod.schottky_jacobi_candidate(P, Q, M, args.genus,
                                               _bound(args, cfg), _budget(cfg))
        _emit_expansion(exp, args, cfg)
        return 0

    if cmd == "op":
        exp = _load_expansion_arg(args.input)
        if subcmd == "phi":
            if not isinstance(exp, expmod.SiegelExpansion):
                raise FormatError("op phi expects a Siegel expansion")
            _emit_expansion(opmod.siegel_phi(exp), args, cfg)
        else:
            if not isinstance(exp, expmod.JacobiExpansion):
                raise FormatError("op psi expects a Jacobi expansion")
            _emit_expansion(opmod.siegel_jacobi_psi(exp), args, cfg)
        return 0

    if cmd == "product":
        L = latmod.catalog_lattice(args.lattice)
        M = latmod.catalog_lattice(args.index_lattice)
        bound = _bound(args, cfg)
        bud = _budget(cfg)
        f = thetamod.siegel_theta(L, args.genus, bound, bud)
        F = thetamod.jacobi_theta(M, args.genus, bound, bud)
        _emit_expansion(opmod.shimura_product(f, F), args, cfg)
        return 0

    if cmd == "verify" and subcmd == "stable":
        bound = _bound(args, cfg)
        bud = _budget(cfg)
        if args.max_genus < 0:
            raise FormatError("max-genus must be nonnegative")
        if args.kind == "siegel":
            if not args.lattice:
                raise FormatError("verify stable --kind siegel needs --lattice")
            L = latmod.catalog_lattice(args.lattice)
            family = [thetamod.siegel_theta(L, g, bound, bud)
                      for g in range(args.max_genus + 1)]
        else:
            if not args.index_lattice:
                raise FormatError("verify stable --kind jacobi needs --index-lattice")
            M = latmod.catalog_lattice(args.index_lattice)
            family = [thetamod.jacobi_theta(M, g, bound, bud)
                      for g in range(args.max_genus + 1)]
        report = opmod.verify_stable(family, args.kind)
        _emit_report(report.as_dict(), args, cfg)
        return 0 if report.all_pass else 1

    if cmd == "verify" and subcmd == "singular":
        exp = _load_expansion_arg(args.input)
        if not isinstance(exp, expmod.JacobiExpansion):
            raise FormatError("verify singular expects a Jacobi expansion")
        rep = expmod.singular_support_check(exp)
        doc = {"all_singular": rep.all_singular,
               "witness": None if rep.witness is None else
               expmod.canonical_key(rep.witness[0], rep.witness[1]).decode()}
        _emit_report(doc, args, cfg)
        return 0 if rep.all_singular else 1

    if cmd == "check" and subcmd == "pair":
        P = latmod.catalog_lattice(args.p)
        Q = latmod.catalog_lattice(args.q)
        detail = schmod.pair_condition(P, Q, budget=_budget(cfg))
        _emit_report(detail.as_dict(), args, cfg)
        return 0

    if cmd == "check" and subcmd == "inversion":
        L = latmod.catalog_lattice(args.lattice)
        doc = json.loads(_read_input(args.input))
        point = nummod.point_from_json(doc)
        if point.genus != 1:
            raise FormatError("inversion check needs a genus-1 point")
        tau = complex(point.tau[0, 0])
        residual = nummod.check_inversion_genus1(L, tau, args.tol, _budget(cfg))
        _emit_report({"tau_re": tau.real, "tau_im": tau.imag,
                      "residual": residual, "tol": args.tol}, args, cfg)
        return 0 if residual <= args.tol else 1

    if cmd == "eval":
        doc = json.loads(_read_input(args.input))
        if not isinstance(doc, dict) or "expansion" not in doc or "point" not in doc:
            raise FormatError('eval expects {"expansion": ..., "point": ...}')
        exp = expmod.deserialize(doc["expansion"])
        if isinstance(exp, expmod.JacobiExpansion):
            point = nummod.point_from_json(doc["point"], width=exp.width)
            res = nummod.eval_jacobi_expansion(exp, point)
        else:
            point = nummod.point_from_json(doc["point"])
            res = nummod.eval_siegel_expansion(exp, point)
        _emit_report({"value_re": res.value.real, "value_im": res.value.imag,
                      "tail": res.tail}, args, cfg)
        return 0

    raise FormatError(f"unhandled command {cmd!r}")


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return _run(args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (CatalogError, FormatError, ShapeError, UnsupportedError,
            ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
