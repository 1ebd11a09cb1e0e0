"""Command-line front end.

Exit codes: 0 success, 1 computation or data error, 2 usage error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field

import numpy as np

from . import analysis, bases, baseline, states
from . import io as sio
from . import numtheory as nt
from .errors import MissingRequired, SchemaViolation, UnknownFlag, UsageError, WitnessError
from .qcore import BasisSet, basis_set_from_dict, basis_set_to_dict, complex_to_json, density_from_dict, density_to_dict
from .witness import certify, operator_inequality_check

CURVES = ("fig1", "figA1", "figA3", "figA4", "cmin-bound", "levy")
CURVES_NEED_DIM = ("fig1", "figA3", "figA4")
FAMILIES = ("three-mubs", "amub", "tilted", "random", "ivonovic", "prime-mubs")


@dataclass
class RunConfig:
    command: str
    parameters: dict = field(default_factory=dict)
    output_path: str | None = None
    seed: int | None = None


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        if "required" in message:
            raise MissingRequired(message)
        if "unrecognized" in message:
            raise UnknownFlag(message)
        raise UsageError(message)


def _build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="schmidtwitness", description="Schmidt-number witness toolkit")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    c = sub.add_parser("certify", help="certify a Schmidt-number lower bound")
    c.add_argument("--state")
    c.add_argument("--bases", required=True)
    c.add_argument("--counts")
    c.add_argument("--mode", choices=("tight", "loose"), default="tight")
    c.add_argument("--report", dest="out")

    g = sub.add_parser("gen-bases", help="write a basis family as JSON")
    g.add_argument("--family", choices=FAMILIES, required=True)
    g.add_argument("--dim", type=int, required=True)
    g.add_argument("--pr", type=int, default=1)
    g.add_argument("--p-eff", type=float)
    g.add_argument("--m", type=int, default=2, help="number of random bases")
    g.add_argument("--M", type=int, default=1, help="number of tilted families")
    g.add_argument("--lambda", dest="lam", help="comma-separated Schmidt coefficients")
    g.add_argument("--seed", type=int)
    g.add_argument("--out")

    s = sub.add_parser("gen-state", help="write a benchmark state as JSON")
    s.add_argument("--family", choices=("isotropic", "thermal"), required=True)
    s.add_argument("--dim", type=int, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--beta", type=float, default=0.0)
    s.add_argument("--out")

    sc = sub.add_parser("scan", help="write threshold curves as CSV")
    sc.add_argument("--curve", choices=CURVES, required=True)
    sc.add_argument("--dim", type=int)
    sc.add_argument("--params", default="")
    sc.add_argument("--out")

    cm = sub.add_parser("compare", help="baseline witness next to this witness")
    cm.add_argument("--state", required=True)
    cm.add_argument("--M", type=int, required=True)
    cm.add_argument("--bases")
    cm.add_argument("--mode", choices=("tight", "loose"), default="tight")
    cm.add_argument("--out")

    ch = sub.add_parser("check", help="run the quick property suite")
    ch.add_argument("--seed", type=int, default=0)
    ch.add_argument("--out")
    return p


def _parse_params(text: str) -> dict:
    out = {}
    for item in filter(None, (t.strip() for t in text.split(","))):
        if "=" not in item:
            raise UsageError(f"bad parameter {item!r}; expected key=value")
        k, v = item.split("=", 1)
        try:
            out[k.strip()] = int(v)
        except ValueError:
            try:
                out[k.strip()] = float(v)
            except ValueError:
                out[k.strip()] = v.strip()
    return out


def parse_cli(argv) -> RunConfig:
    ns = _build_parser().parse_args(list(argv))
    if ns.command is None:
        raise MissingRequired("a command is required")
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "seed")}
    seed = getattr(ns, "seed", None)
    if ns.command == "certify" and not (ns.state or ns.counts):
        raise MissingRequired("certify needs --state or --counts")
    if ns.command == "gen-bases":
        if ns.dim < 2:
            raise UsageError("--dim must be >= 2")
        if ns.family == "random" and seed is None:
            raise MissingRequired("--seed is required for random bases")
    if ns.command == "gen-state" and ns.dim < 2:
        raise UsageError("--dim must be >= 2")
    if ns.command == "scan":
        extra = _parse_params(ns.params)
        if ns.dim is not None:
            extra["dim"] = ns.dim
        if ns.curve in CURVES_NEED_DIM and "dim" not in extra:
            raise MissingRequired(f"scan --curve {ns.curve} needs a dimension (--dim or dim=)")
        if "dim" in extra and (not isinstance(extra["dim"], int) or extra["dim"] < 2):
            raise UsageError("dim must be an integer >= 2")
        params = {"curve": ns.curve, **extra}
    return RunConfig(ns.command, params, getattr(ns, "out", None), seed)


# ---------------------------------------------------------------------------
# command bodies


def _load_bases(path) -> BasisSet:
    return basis_set_from_dict(sio.load_json(path))


def _run_certify(cfg: RunConfig):
    p = cfg.parameters
    bs = _load_bases(p["bases"])
    data = sio.load_counts(p["counts"]) if p.get("counts") else density_from_dict(sio.load_json(p["state"]))
    return certify(data, bs, p["mode"])


def _run_gen_bases(cfg: RunConfig):
    p = cfg.parameters
    d, fam = p["dim"], p["family"]
    if fam == "three-mubs":
        return basis_set_to_dict(bases.three_mubs(d, p["pr"]))
    if fam == "amub":
        return basis_set_to_dict(bases.amub_set(d, p["p_eff"]))
    if fam == "ivonovic":
        return basis_set_to_dict(BasisSet((bases.ivonovic_quadratic(d),)))
    if fam == "prime-mubs":
        return basis_set_to_dict(bases.prime_mubs(d))
    if fam == "random":
        rng = np.random.default_rng(cfg.seed)
        return basis_set_to_dict(BasisSet(tuple(bases.random_basis(d, rng) for _ in range(p["m"]))))
    lam = np.full(d, 1 / np.sqrt(d)) if p["lam"] is None else np.array([float(x) for x in p["lam"].split(",")])
    if lam.size != d:
        raise SchemaViolation(f"--lambda needs {d} entries")
    fams = bases.tilted_bases(lam, p["M"])
    return {
        "dim": d,
        "families": [
            {"alpha": f.alpha, "orthogonal": f.orthogonal, "vectors": complex_to_json(f.matrix.T)} for f in fams
        ],
    }


def _run_gen_state(cfg: RunConfig):
    p = cfg.parameters
    if p["family"] == "isotropic":
        return density_to_dict(states.isotropic(p["dim"], p["p"]))
    return density_to_dict(states.purified_thermal(p["dim"], p["beta"], p["p"]))


def _run_scan(cfg: RunConfig) -> list[dict]:
    p = dict(cfg.parameters)
    curve = p.pop("curve")
    d = p.pop("dim", None)
    if curve == "fig1":
        ms = tuple(int(x) for x in str(p.get("m", "2;3;6")).split(";"))
        return analysis.scan_fig1(d, ms, n=int(p.get("n", 201)))
    if curve == "figA1":
        return analysis.scan_figA1(int(p.get("d_max", d or 30)), int(p.get("m", 2)), float(p.get("p", 0.005)))
    if curve == "figA3":
        return analysis.scan_figA3(d, float(p.get("beta", 0.5)), int(p.get("n", 181)))
    if curve == "figA4":
        return analysis.scan_figA4(d, float(p.get("theta", 0.05)), float(p.get("beta_max", 10.0)), int(p.get("n", 201)))
    if curve == "cmin-bound":
        return analysis.scan_cmin_bound(int(p.get("d_max", d or 100)))
    return analysis.scan_levy()


def _run_compare(cfg: RunConfig):
    p = cfg.parameters
    rho = density_from_dict(sio.load_json(p["state"]))
    bs = _load_bases(p["bases"]) if p.get("bases") else bases.three_mubs(rho.d)
    return {
        "baseline": baseline.baseline_fidelity_bound(rho, p["M"]).to_dict(),
        "witness": certify(rho, bs, p["mode"]).to_dict(),
    }


def run_checks(seed: int = 0) -> list[tuple[str, bool, str]]:
    """Quick property suite; each entry is (name, passed, detail)."""
    rng = np.random.default_rng(seed)
    out = []

    worst = 0.0
    for d in (3, 4, 5):
        for m in (2, 3):
            bs = BasisSet(tuple(bases.random_basis(d, rng) for _ in range(m)), bases.random_unitary(d, rng))
            worst = max(worst, operator_inequality_check(bs))
    out.append(("operator inequality", worst <= 1e-8, f"max eigenvalue {worst:.3g}"))

    dev = 0.0
    for d in range(2, 31):
        for pr in (1, 3, 5):
            try:
                bs = bases.three_mubs(d, pr)
            except WitnessError:
                continue
            for z in range(3):
                for w in range(z + 1, 3):
                    ov = np.abs(bs.bases[z].matrix.conj().T @ bs.bases[w].matrix) ** 2
                    dev = max(dev, float(np.max(np.abs(ov - 1 / d))))
    out.append(("three-MUB unbiasedness", dev <= 1e-9, f"max deviation {dev:.3g}"))

    dev = 0.0
    for c in range(1, 100, 2):
        for a in range(1, c + 1):
            if np.gcd(a, c) != 1:
                continue
            b = int(rng.integers(c))
            dev = max(dev, abs(abs(nt.gauss_sum_direct(a, b, c)) - np.sqrt(c)))
    out.append(("Gauss-sum magnitudes", dev <= 1e-8, f"max deviation {dev:.3g}"))

    slack = np.inf
    fams = [bases.three_mubs(6), bases.prime_mubs(5), bases.amub_set(6)]
    for bs in fams:
        vecs = np.hstack([b.matrix for b in bs.bases])
        for k in (1, 2):
            slack = min(slack, analysis.welch_check(vecs, k))
    out.append(("Welch bound", slack >= -1e-9, f"min slack {slack:.3g}"))
    return out


def main(argv=None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_cli(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    try:
        if cfg.command == "certify":
            sio.emit_report(_run_certify(cfg), cfg.output_path)
        elif cfg.command == "gen-bases":
            sio.emit_report(_run_gen_bases(cfg), cfg.output_path)
        elif cfg.command == "gen-state":
            sio.emit_report(_run_gen_state(cfg), cfg.output_path)
        elif cfg.command == "scan":
            sio.emit_csv(_run_scan(cfg), cfg.output_path)
        elif cfg.command == "compare":
            sio.emit_report(_run_compare(cfg), cfg.output_path)
        elif cfg.command == "check":
            results = run_checks(cfg.seed or 0)
            lines = [f"{'PASS' if ok else 'FAIL'} {name}: {detail}" for name, ok, detail in results]
            sio.write_text("\n".join(lines) + "\n", cfg.output_path)
            return 0 if all(ok for _, ok, _ in results) else 1
    except WitnessError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
