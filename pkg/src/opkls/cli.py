"""Command-line front end.

Commands: lattice, kl, betti, dims, verify.  Exit codes: 0 ok, 1 a
verification failed, 2 bad input, 3 a size guard tripped.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass
from typing import Callable

from .errors import InputError, NotGeometric, OpklsError, SizeGuardExceeded, VerificationError
from .lattices import build_lattice, poset_from_json
from .poset import DEFAULT_MAX_CHAINS, DEFAULT_MAX_ELEMENTS, GeometricLattice

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_SIZE = 0, 1, 2, 3
BETTI_VARIANTS = ("rkls", "lkls", "rkls-hat", "lkls-hat", "bar", "kos")


@dataclass
class RunConfig:
    command: str
    builtin: str | None = None
    input: str | None = None
    format: str = "text"
    weight: int | None = None
    variant: str | None = None
    max_elements: int = DEFAULT_MAX_ELEMENTS
    max_chains: int = DEFAULT_MAX_CHAINS
    jobs: int = 1
    check: str | None = None
    verbose: int = 0

    def validate(self) -> None:
        if (self.builtin is None) == (self.input is None):
            raise InputError("give exactly one of --builtin or --input")
        if self.max_elements < 1 or self.max_chains < 1 or self.jobs < 1:
            raise InputError("--max-elements, --max-chains and --jobs must be positive")
        if self.weight is not None and self.weight < 0:
            raise InputError("--weight must be non-negative")

    @property
    def name(self) -> str:
        return self.builtin if self.builtin is not None else self.input

    def spec(self):
        """A picklable lattice description for worker processes."""
        if self.builtin is not None:
            return self.builtin
        return _read_json(self.input)

    def lattice(self) -> GeometricLattice:
        return build_lattice(self.spec(), max_elements=self.max_elements)


def _read_json(path: str):
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None


def _label(L, x) -> str:
    lab = L.labels[x]
    if isinstance(lab, tuple):
        return "{" + ",".join(str(t) for t in lab) + "}"
    return str(lab)


# -- output ---------------------------------------------------------------


def _emit(cfg: RunConfig, report: dict, rows: list[list] | None, text: str, out) -> None:
    if cfg.format == "json":
        out.write(json.dumps(report, indent=2, sort_keys=False) + "\n")
    elif cfg.format == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        for r in rows or []:
            w.writerow(r)
        out.write(buf.getvalue())
    else:
        out.write(text.rstrip("\n") + "\n")


# -- commands -------------------------------------------------------------


def cmd_lattice(cfg: RunConfig, out) -> int:
    L = cfg.lattice()
    chi = L.characteristic_polynomial()
    mob = [[x, y, L.mobius(x, y)] for x, y in L.pairs()]
    report = {
        "lattice": cfg.name,
        "elements": [_label(L, x) for x in range(L.n)],
        "rank": L.rank,
        "atoms": [_label(L, a) for a in L.atom_list],
        "mobius": mob,
        "characteristic": chi.to_list(),
    }
    lines = [f"lattice: {cfg.name}", f"elements: {L.n}", f"rank: {L.rank}",
             "atoms: " + " ".join(report["atoms"]), f"characteristic polynomial: {chi}",
             "mobius (x, y, mu):"]
    lines += [f"  {_label(L, x)} {_label(L, y)} {m}" for x, y, m in mob]
    rows = [["x", "y", "rank", "mobius"]] + [[x, y, L.rank_between(x, y), m] for x, y, m in mob]
    _emit(cfg, report, rows, "\n".join(lines), out)
    return EXIT_OK


def _betti_jobs(cfg: RunConfig, L, pairs):
    from .bar import run_jobs

    spec = cfg.spec()
    jobs = [(spec, v, w, cfg.max_elements, cfg.max_chains) for v, w in pairs]
    return run_jobs(jobs, cfg.jobs)


def cmd_kl(cfg: RunConfig, out) -> int:
    from .bar import LKLS_HAT, RKLS, check_concentration
    from .kls import characteristic_kernel, inverse_kl_polynomial, kls_right
    from .polynomial import Poly

    L = cfg.lattice()
    table = kls_right(characteristic_kernel(L))
    p_oracle = table.top()
    q_oracle = inverse_kl_polynomial(L)
    weights = list(range((L.rank + 1) // 2)) if L.rank else []
    pairs = [(v, i) for i in weights for v in (RKLS, LKLS_HAT)]
    results = dict(zip(pairs, _betti_jobs(cfg, L, pairs)))
    for (v, i), b in results.items():
        check_concentration(L, i, v, b)
    p_cx = Poly([results[(RKLS, i)].get(i, 0) for i in weights]) if weights else Poly.const(1)
    q_cx = Poly([results[(LKLS_HAT, i)].get(i, 0) for i in weights]) if weights else Poly.const(1)
    match = p_cx == p_oracle and q_cx == q_oracle
    report = {
        "lattice": cfg.name,
        "P": {"recursion": p_oracle.to_list(), "complexes": p_cx.to_list()},
        "Q": {"recursion": q_oracle.to_list(), "complexes": q_cx.to_list()},
        "match": match,
        "betti": [{"lattice": cfg.name, "variant": v, "weight": i,
                   "betti": {str(d): b for d, b in results[(v, i)].items()},
                   "euler": sum((-1) ** d * b for d, b in results[(v, i)].items())}
                  for v, i in pairs],
        "intervals": [{"interval": [x, y], "coeffs": table.entry(x, y).to_list()}
                      for x, y in L.pairs()],
    }
    text = (f"lattice: {cfg.name}\n"
            f"P (recursion) = {p_oracle}\nP (complexes) = {p_cx}\n"
            f"Q (recursion) = {q_oracle}\nQ (complexes) = {q_cx}\n"
            f"verdict: {'match' if match else 'MISMATCH'}")
    _emit(cfg, report, [["x", "y", "rank", "coeffs..."]] + table.to_rows(), text, out)
    return EXIT_OK if match else EXIT_VERIFY


def cmd_betti(cfg: RunConfig, out) -> int:
    L = cfg.lattice()
    variants = [cfg.variant] if cfg.variant else list(BETTI_VARIANTS)
    weights = [cfg.weight] if cfg.weight is not None else list(range(L.rank + 1))
    pairs = [(v, w) for v in variants for w in weights]
    results = _betti_jobs(cfg, L, pairs)
    entries = []
    for (v, w), b in zip(pairs, results):
        entries.append({"lattice": cfg.name, "variant": v, "weight": w,
                        "betti": {str(d): n for d, n in b.items()},
                        "euler": sum((-1) ** d * n for d, n in b.items())})
    rows = [["variant", "weight", "degree", "betti"]]
    rows += [[e["variant"], e["weight"], d, n] for e in entries for d, n in e["betti"].items()]
    text = "\n".join(f"{e['variant']:>9} weight {e['weight']}: "
                     + " ".join(f"H^{d}={n}" for d, n in e["betti"].items())
                     + f"  euler={e['euler']}" for e in entries)
    report = entries[0] if len(entries) == 1 else {"lattice": cfg.name, "tables": entries}
    _emit(cfg, report, rows, text, out)
    return EXIT_OK


def cmd_dims(cfg: RunConfig, out) -> int:
    from .gerst import COM, GERST, LIE, gerst_space, normal_monomials
    from .os_algebra import os_family

    L = cfg.lattice()
    sp = gerst_space(L)
    alg = os_family(L).algebra()
    dims = sp.dimensions()
    report = {
        "lattice": cfg.name,
        "gerst": [{"bigrade": list(k), "dim": v} for k, v in dims.items()],
        "hilbert": sp.hilbert_series().to_list(),
        "chi_plus": L.characteristic_polynomial(unsigned=True).to_list(),
        "os_whitney": [alg.dimension(d) for d in range(L.rank + 1)],
        "normal_monomials": {k: len(normal_monomials(L, k)) for k in (COM, LIE, GERST)},
    }
    text = [f"lattice: {cfg.name}",
            "gerst: " + " ".join(f"({c},{l}):{v}" for (c, l), v in dims.items()),
            f"hilbert series: {sp.hilbert_series()}",
            "os dims by degree: " + " ".join(str(d) for d in report["os_whitney"]),
            "normal monomials: " + " ".join(f"{k}={v}" for k, v in report["normal_monomials"].items())]
    rows = [["c_weight", "l_weight", "dim"]] + [[c, l, v] for (c, l), v in dims.items()]
    _emit(cfg, report, rows, "\n".join(text), out)
    return EXIT_OK


# -- verify ---------------------------------------------------------------


def _chk_el(L):
    from .poset import el_labeling_min_atom
    el_labeling_min_atom(L, verify_max_rank=L.rank)
    return True, "minimal-atom labeling is EL"


def _chk_kernel(L):
    from .kls import characteristic_kernel, is_kernel
    ok, w = is_kernel(characteristic_kernel(L))
    return ok, "chi is a kernel" if ok else f"fails on {w}"


def _chk_os_dims(L):
    from .os_algebra import os_family
    fam = os_family(L)
    bad = [(x, y) for x, y in L.pairs() if x != y
           and fam.algebra(x, y).dimension() != sum(abs(L.mobius(x, g)) for g in L.interval_elements(x, y))]
    return not bad, f"{len(bad)} intervals with dim OS != sum |mu|"


def _chk_operad(L):
    from .gerst import check_operad_axiom
    for x, y in L.pairs():
        if L.rank_between(x, y) >= 2:
            ok, w = check_operad_axiom(L, x, y)
            if not ok:
                return False, f"associativity fails on [{x}, {y}] at {w}"
    return True, "operad axiom holds on all intervals"


def _chk_coproduct(L):
    from .os_algebra import check_coassociative, check_multiplicative, os_family
    fam = os_family(L)
    for x, y in L.pairs():
        for g in L.interior(x, y):
            for tw in (False, True):
                w = check_multiplicative(fam, x, y, g, tw)
                if w is not None:
                    return False, f"multiplicativity fails at {(x, y, g, tw)}: {w}"
            for g2 in L.interior(g, y):
                for tw in (False, True):
                    if check_coassociative(fam, x, y, g, g2, tw, corrected=True) is not None:
                        return False, f"coassociativity fails at {(x, y, g, g2, tw)}"
    return True, "coproducts multiplicative and coassociative"


def _chk_groebner(L):
    from .gerst import COM, LIE, normal_monomials, quotient_dimension
    for x, y in L.pairs():
        if x == y:
            continue
        mu = abs(L.mobius(x, y))
        c, l = len(normal_monomials(L, COM, x, y)), len(normal_monomials(L, LIE, x, y))
        if c != 1 or l != mu:
            return False, f"normal monomial counts ({c}, {l}) on [{x}, {y}]"
        if L.rank_between(x, y) <= 4 and (quotient_dimension(L, COM, x, y) != 1
                                          or quotient_dimension(L, LIE, x, y) != mu):
            return False, f"quotient dimensions disagree on [{x}, {y}]"
    return True, "Com and Lie normal monomials match the quotients"


def _chk_gerst_dims(L):
    from .gerst import GERST, gerst_space, normal_monomials
    sp = gerst_space(L)
    chi_plus = L.characteristic_polynomial(unsigned=True)
    n = len(normal_monomials(L, GERST))
    ok = sp.hilbert_series() == chi_plus and n == sp.dimension()
    return ok, f"Hilbert series {sp.hilbert_series()}, {n} normal monomials"


def _chk_bar_acyclic(L):
    from .bar import bar_betti
    for w in range(L.rank + 1):
        b = bar_betti(L, w)
        if any(v for d, v in b.items() if d > 0):
            return False, f"weight {w}: {b}"
    return True, "H^{>0}(Bar(Gerst)) = 0"


def _chk_bar_com(L):
    from .bar import bar_com
    c = bar_com(L)
    c.check_d_squared()
    got = {d: v for d, v in c.betti().items() if v}
    hom = L.order_complex_homology()
    want = {L.rank - 2 - s: v for s, v in hom.items() if v}
    return got == want, f"Bar(Com) {got} vs order complex {want}"


def _chk_koszul(L):
    from .bar import koszul_betti
    t = koszul_betti(L)
    bad = [w for w in t.betti if t.nonzero(w) or t.euler_from_chains(w)]
    return not bad, "Kos(Gerst) acyclic" if not bad else f"weights {bad} not acyclic"


def _chk_kls(L):
    from .bar import VARIANTS, check_concentration, kls_betti
    for v in VARIANTS:
        for w in range(L.rank + 1):
            check_concentration(L, w, v, kls_betti(L, w, v))
    return True, "all KLS complexes concentrated"


def _chk_kl_match(L):
    from .bar import kl_via_complexes
    from .kls import inverse_kl_polynomial, kl_polynomial
    p, q, _ = kl_via_complexes(L)
    ok = p == kl_polynomial(L) and q == inverse_kl_polynomial(L)
    return ok, f"P = {p}, Q = {q}"


CHECKS: dict[str, Callable] = {
    "el": _chk_el,
    "kernel": _chk_kernel,
    "os-dims": _chk_os_dims,
    "operad": _chk_operad,
    "coproduct": _chk_coproduct,
    "groebner": _chk_groebner,
    "gerst-dims": _chk_gerst_dims,
    "bar-acyclic": _chk_bar_acyclic,
    "bar-com": _chk_bar_com,
    "koszul": _chk_koszul,
    "kls": _chk_kls,
    "kl-match": _chk_kl_match,
}


def cmd_verify(cfg: RunConfig, out) -> int:
    if cfg.check is not None and cfg.check not in CHECKS:
        raise InputError(f"unknown check {cfg.check!r}; choose from {', '.join(CHECKS)}")
    results: list[tuple[str, str, str]] = []
    spec = cfg.spec()
    L = None
    try:
        L = build_lattice(spec, max_elements=cfg.max_elements)
        results.append(("geometric", "pass", f"{L.n} elements, rank {L.rank}"))
    except NotGeometric as exc:
        if isinstance(spec, dict) and "covers" in spec:
            poset_from_json(spec, max_elements=cfg.max_elements)  # other input errors propagate
        results.append(("geometric", "FAIL", str(exc)))
    names = [cfg.check] if cfg.check else list(CHECKS)
    for name in names:
        if L is None:
            results.append((name, "skip", "needs a geometric lattice"))
            continue
        try:
            ok, msg = CHECKS[name](L)
        except VerificationError as exc:
            ok, msg = False, f"{type(exc).__name__}: {exc}"
        results.append((name, "pass" if ok else "FAIL", msg))
    failed = any(s == "FAIL" for _, s, _ in results)
    report = {"lattice": cfg.name, "ok": not failed,
              "checks": [{"check": n, "status": s, "detail": d} for n, s, d in results]}
    rows = [["check", "status", "detail"]] + [list(r) for r in results]
    text = "\n".join(f"{s:>4}  {n:<12} {d}" for n, s, d in results)
    _emit(cfg, report, rows, text, out)
    return EXIT_VERIFY if failed else EXIT_OK


COMMANDS = {"lattice": cmd_lattice, "kl": cmd_kl, "betti": cmd_betti,
            "dims": cmd_dims, "verify": cmd_verify}


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="opkls", description="Operadic KLS computations on geometric lattices.")
    sub = p.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        s = sub.add_parser(name)
        src = s.add_mutually_exclusive_group(required=True)
        src.add_argument("--builtin", metavar="NAME",
                         help="boolean:n, uniform:k,n, partition:n, graph:PATH|Kn|Cn")
        src.add_argument("--input", metavar="PATH", help="JSON poset or matroid file")
        s.add_argument("--format", choices=("json", "csv", "text"), default="text")
        s.add_argument("--weight", type=int)
        s.add_argument("--variant", choices=BETTI_VARIANTS)
        s.add_argument("--max-elements", type=int, default=DEFAULT_MAX_ELEMENTS)
        s.add_argument("--max-chains", type=int, default=DEFAULT_MAX_CHAINS)
        s.add_argument("--jobs", type=int, default=1)
        s.add_argument("--check", metavar="NAME")
        s.add_argument("-v", "--verbose", action="count", default=0)
    return p


def main(argv: list[str] | None = None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    cfg = RunConfig(**vars(args))
    from . import poset

    saved = poset.DEFAULT_MAX_CHAINS
    try:
        cfg.validate()
        poset.DEFAULT_MAX_CHAINS = cfg.max_chains
        return COMMANDS[cfg.command](cfg, out)
    except SizeGuardExceeded as exc:
        err.write(f"size guard: {exc}\n")
        return EXIT_SIZE
    except InputError as exc:
        err.write(f"input error: {exc}\n")
        return EXIT_INPUT
    except VerificationError as exc:
        err.write(f"{type(exc).__name__}: {exc}\n")
        return EXIT_VERIFY
    except OpklsError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    finally:
        poset.DEFAULT_MAX_CHAINS = saved


if __name__ == "__main__":
    sys.exit(main())
