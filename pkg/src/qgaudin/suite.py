"""Batch drivers behind the CLI subcommands.

Each ``run_*`` function takes a :class:`JobConfig` and returns an
:class:`IdentityReport`; all randomness is drawn from ``config.seed``.
"""

from __future__ import annotations

import itertools
import math
import time
from contextlib import contextmanager
from typing import Optional

import numpy as np

from . import algebra, bethe, couplings, magnet, rmatrix
from .algebra import Realization, RealizationKind
from .config import JobConfig
from .couplings import CouplingFamily, Family
from .report import IdentityReport
from .spin import MINUS, PLUS, ZERO, SpinSystem, dot_product, total_sz

PERMUTATIONS = tuple(itertools.permutations((0, 1, 2)))

ANCHORS = {
    "gaudin_equation": "w_ij^a w_jk^c + w_ji^b w_ik^c - w_ik^a w_jk^b = 0 for all permutations (a,b,c)",
    "symmetry_defect": "w_ij + w_ji = 0 (rational/trig/hyperbolic) or -2q (q-deformed)",
    "commutativity": "[h_i, h_j] = 0",
    "total_sz": "[h_i, T] = 0 with T = sum_j t_j^0",
    "casimir": "[h_i, t_j.t_j] = 0",
    "sum_rule": "sum_i h_i = 0, or -q sum_{i!=j} t_i.t_j for the q-deformed family",
    "algebra": "Gaudin / q-Gaudin algebra commutation relations of J^{0,+,-}(lambda)",
    "adjoint": "J+(lambda)^dagger = J-(conj lambda)",
    "spectral_commutativity": "[H(lambda), H(mu)] = 0",
    "lowest_weight": "H(lambda)|0> = (W^2 - W' - 2qW)|0>",
    "weight_derivative": "analytic W'(lambda) agrees with a central difference",
    "residue": "-1/2 Res_{lambda=u_i} H(lambda) = h_i (rational) or h_i - q t_i.t_i (q-deformed)",
    "trace_formula": "H(lambda) = 1/2 Tr L(lambda)^2",
    "cybe": "[r13, r23] + [r12, r13] + [r12, r23] = 0 with r = P/(lambda-mu)",
    "qcybe": "[r_-q^13, r_q^23] + [r_-q^12, r_q^23] + [r_-q^12, r_q^13] = 0",
    "linear_structure": "[L(l) x I, I x L(m)] + [r, L(l) x I] + [r', I x L(m)] = 0",
    "bethe_residual": "W(xi_a) = sum_{b != a} K(xi_a - xi_b)",
    "bethe_energy": "E_{i,n} = E_{i,0} - s_i sum_a K(u_i - xi_a) is an eigenvalue of h_i",
    "bethe_overlap": "J+(xi_1)...J+(xi_n)|0> is a joint eigenvector of the magnets",
    "bethe_eigenvector": "H(lambda)|xi> = E_n(lambda)|xi>",
    "joint_spectrum": "one orthonormal basis diagonalizes every h_i",
    "nogo_zero": "a standard r-matrix exists for q = 0 (the rational algebra)",
    "nogo_recovery": "the fitted r-matrix at q = 0 is P/(lambda-mu)",
    "nogo_gap_slope": "no standard r-matrix for q != 0: the r_23 constraints differ by 2q",
}


class _Timer:
    def __init__(self):
        self.timings: dict[str, float] = {}

    @contextmanager
    def __call__(self, name):
        t0 = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = self.timings.get(name, 0.0) + time.perf_counter() - t0


def pole_distance(family: CouplingFamily, du: float) -> float:
    """Distance from ``du`` to the nearest coupling pole of ``family``."""
    if family.tag is Family.TRIGONOMETRIC:
        period = math.pi / abs(family.param)
        return abs(du - round(du / period) * period)
    return abs(du)


def sample_triples(family: CouplingFamily, count: int, rng: np.random.Generator, lo=-5.0, hi=5.0, guard=1e-3):
    """Random distinct triples in ``[lo, hi]`` kept ``guard`` away from all poles."""
    out = []
    while len(out) < count:
        t = rng.uniform(lo, hi, size=3)
        diffs = (t[0] - t[1], t[1] - t[2], t[0] - t[2])
        if all(pole_distance(family, d) > guard for d in diffs):
            out.append(tuple(float(x) for x in t))
    return out


def sample_yang_baxter_triples(count: int, rng: np.random.Generator, lo=-3.0, hi=3.0, separation=0.5):
    """Random real triples with pairwise separation at least ``separation``.

    r-matrix entries grow like 1/separation, so the absolute roundoff floor of
    the Yang-Baxter residual does too; the separation keeps entries O(1).
    """
    out = []
    while len(out) < count:
        t = rng.uniform(lo, hi, size=3)
        if min(abs(t[0] - t[1]), abs(t[1] - t[2]), abs(t[0] - t[2])) >= separation:
            out.append(tuple(float(x) for x in t))
    return out


def max_gaudin_residual(family, triples) -> float:
    return max(couplings.gaudin_residual(family, p, *t) for t in triples for p in PERMUTATIONS)


def sample_spectral_points(system: SpinSystem, count: int, rng: np.random.Generator) -> list[complex]:
    """Spectral parameters off the real axis, hence away from every realization pole."""
    lo, hi = min(system.u) - 1.0, max(system.u) + 1.0
    return [complex(rng.uniform(lo, hi), rng.uniform(0.15, 0.9) * rng.choice([-1, 1])) for _ in range(count)]


def _spectral_pairs(config: JobConfig, rng, count=5):
    pts = list(config.lambdas)
    if len(pts) < 2 * count:
        pts += sample_spectral_points(config.system, 2 * count - len(pts), rng)
    return list(zip(pts[0::2], pts[1::2]))


def _realizations(config: JobConfig) -> list[Realization]:
    fam = config.family
    if fam.tag is Family.RATIONAL:
        return [Realization.rational(config.system)]
    if fam.tag is Family.Q_DEFORMED:
        return [Realization.coth(config.system, fam.param), Realization.tanh(config.system, fam.param)]
    return []


def run_verify(config: JobConfig, tol_scale: float = 1.0) -> IdentityReport:
    """Full identity suite for the configured family and system."""
    fam, system = config.family, config.system
    rng = np.random.default_rng(config.seed)
    report = IdentityReport("verify", metadata=config.describe())
    timer = _Timer()

    def tol(key):
        return config.tolerance(key, tol_scale)

    with timer("couplings"):
        triples = sample_triples(fam, config.triples, rng)
        report.add("gaudin_equation", max_gaudin_residual(fam, triples), tol("gaudin_equation"), ANCHORS["gaudin_equation"])
        expected = couplings.expected_symmetry_defect(fam)
        worst = max(
            abs(couplings.symmetry_defect(fam, a, t[0] - t[1]) - expected) for t in triples for a in range(3)
        )
        report.add("symmetry_defect", worst, tol("symmetry_defect"), ANCHORS["symmetry_defect"])

    if system.n_sites >= 2:
        with timer("magnets"):
            mags = magnet.build_magnets(system, fam)
            hs = mags.hamiltonians
            pairs = itertools.combinations(range(len(hs)), 2)
            report.add(
                "commutativity",
                max((magnet.commutator_norm(hs[i], hs[j]) for i, j in pairs), default=0.0),
                tol("commutativity"),
                ANCHORS["commutativity"],
            )
            tz = total_sz(system)
            report.add("total_sz", max(magnet.commutator_norm(h, tz) for h in hs), tol("total_sz"), ANCHORS["total_sz"])
            cas = [dot_product(system, j, j) for j in range(system.n_sites)]
            report.add(
                "casimir",
                max(magnet.commutator_norm(h, c) for h in hs for c in cas),
                tol("casimir"),
                ANCHORS["casimir"],
            )
            report.add("sum_rule", magnet.sum_rule_check(mags), tol("sum_rule"), ANCHORS["sum_rule"])
            if fam.tag is Family.Q_DEFORMED:
                # the sum rule also separates the q-family from every odd family
                gap = magnet.sum_rule_check(mags, rhs=np.zeros_like(hs[0]))
                report.metadata["sum_rule_nonzero_norm"] = gap

    pairs = _spectral_pairs(config, rng)
    for real in _realizations(config):
        tag = real.label()
        with timer(f"algebra:{tag}"):
            alg = max(max(algebra.algebra_residuals(real, lam, mu).values()) for lam, mu in pairs)
            same = max(max(algebra.algebra_residuals(real, lam, lam).values()) for lam, _ in pairs)
            report.add(f"algebra[{tag}]", max(alg, same), tol("algebra"), ANCHORS["algebra"])
            adj = max(
                float(
                    np.linalg.norm(
                        algebra.generator(real, PLUS, lam).conj().T - algebra.generator(real, MINUS, lam.conjugate())
                    )
                )
                for lam, _ in pairs
            )
            report.add(f"adjoint[{tag}]", adj, tol("adjoint"), ANCHORS["adjoint"])
        with timer(f"spectral:{tag}"):
            comm = max(
                magnet.commutator_norm(algebra.spectral_operator(real, lam), algebra.spectral_operator(real, mu))
                for lam, mu in pairs
            )
            report.add(f"spectral_commutativity[{tag}]", comm, tol("spectral_commutativity"), ANCHORS["spectral_commutativity"])
            lw = 0.0
            dw = 0.0
            for lam, _ in pairs:
                e0 = algebra.lowest_weight_energy(real, lam)
                lw = max(lw, algebra.lowest_weight_check(real, lam)["H|0>-E0|0>"] / max(1.0, abs(e0)))
                h = 1e-5
                fd = (algebra.weight_function(real, lam + h) - algebra.weight_function(real, lam - h)) / (2 * h)
                dw = max(dw, abs(fd - algebra.weight_function_derivative(real, lam)))
            report.add(f"lowest_weight[{tag}]", lw, tol("lowest_weight"), ANCHORS["lowest_weight"])
            report.add(f"weight_derivative[{tag}]", dw, tol("weight_derivative"), ANCHORS["weight_derivative"])
            tr = max(rmatrix.trace_formula_check(real, lam) for lam, _ in pairs)
            report.add(f"trace_formula[{tag}]", tr, tol("trace_formula"), ANCHORS["trace_formula"])
        if real.kind is not RealizationKind.TANH and system.n_sites >= 2:
            with timer(f"residue:{tag}"):
                mags = magnet.build_magnets(system, real.magnet_family())
                worst = 0.0
                for i in range(system.n_sites):
                    target = mags[i] - real.shift * dot_product(system, i, i)
                    worst = max(worst, float(np.linalg.norm(algebra.residue_at(real, i) - target)))
                report.add(f"residue[{tag}]", worst, tol("residue"), ANCHORS["residue"])
        with timer(f"linear_structure:{tag}"):
            ls = max(rmatrix.linear_structure_residual(real, lam, mu) for lam, mu in pairs[:3])
            report.add(f"linear_structure[{tag}]", ls, tol("linear_structure"), ANCHORS["linear_structure"])

    if fam.tag in (Family.RATIONAL, Family.Q_DEFORMED):
        with timer("yang_baxter"):
            trip = sample_yang_baxter_triples(config.triples, rng)
            if fam.tag is Family.RATIONAL:
                worst = max(rmatrix.cybe_residual(*t) for t in trip)
                report.add("cybe", worst, tol("cybe"), ANCHORS["cybe"])
            else:
                worst = max(rmatrix.qcybe_residual(*t, fam.param) for t in trip)
                report.add("qcybe", worst, tol("qcybe"), ANCHORS["qcybe"])

    report.timings = timer.timings
    return report


def _bethe_realization(config: JobConfig) -> Realization:
    return Realization.for_family(config.system, config.family)


def run_bethe(config: JobConfig, tol_scale: float = 1.0) -> IdentityReport:
    """Solve the Bethe equations at ``config.n`` and compare with exact diagonalization."""
    from .config import ConfigError

    if config.n is None:
        raise ConfigError("the bethe command needs 'n'")
    real = _bethe_realization(config)
    report = IdentityReport("bethe", metadata={**config.describe(), "n": config.n, "realization": real.label()})
    timer = _Timer()
    with timer("solve"):
        result = bethe.solve_bethe(real, config.n, seed=config.seed)
    with timer("oracle"):
        mags = magnet.build_magnets(config.system, real.magnet_family())
        joint = magnet.simultaneous_spectrum(mags, include_total_sz=True, seed=config.seed)
    rng = np.random.default_rng(config.seed)
    lam = config.lambdas[0] if config.lambdas else sample_spectral_points(config.system, 1, rng)[0]
    h_lam = algebra.spectral_operator(real, lam)
    rows = []
    with timer("compare"):
        for k, st in enumerate(result.states):
            match = bethe.compare_with_oracle(real, st.roots, joint, tol=config.tolerance("bethe_energy", tol_scale))
            v = bethe.bethe_vector(real, st.roots)
            e_lam = bethe.bethe_eigenvalue(real, lam, st.roots)
            eig_res = float(np.linalg.norm(h_lam @ v - e_lam * v) / np.linalg.norm(v))
            oracle_vals = joint.eigenvalues[match.rows[0], :-1] if match.matched else None
            rows.append(
                {
                    "roots": list(st.roots),
                    "bethe_residual": st.residual,
                    "iterations": st.iterations,
                    "energies": match.energies,
                    "oracle_energies": oracle_vals,
                    "max_energy_error": match.max_energy_error,
                    "overlap": match.overlap,
                    "lambda": lam,
                    "H_eigenvalue": e_lam,
                    "H_eigenvector_residual": eig_res,
                }
            )
            report.add(f"bethe[{k}].residual", st.residual, config.tolerance("bethe_residual", tol_scale), ANCHORS["bethe_residual"])
            report.add(f"bethe[{k}].energy", match.max_energy_error, config.tolerance("bethe_energy", tol_scale), ANCHORS["bethe_energy"])
            report.add(f"bethe[{k}].overlap", 1.0 - match.overlap, config.tolerance("bethe_overlap", tol_scale), ANCHORS["bethe_overlap"])
            report.add(
                f"bethe[{k}].H_eigenvector",
                eig_res / max(1.0, abs(e_lam)),
                config.tolerance("bethe_eigenvector", tol_scale),
                ANCHORS["bethe_eigenvector"],
            )
    report.tables["solutions"] = rows
    report.metadata["diagnostics"] = {"starts": result.n_starts, **result.diagnostics}
    report.metadata["coverage"] = bethe.sector_coverage(real, result.states, joint) if result.states else {
        "matched_rows": 0,
        "sector_rows": int(np.sum(np.abs(joint.eigenvalues[:, -1] - (config.n - sum(config.system.spins))) <= 1e-9)),
        "fraction": 0.0,
    }
    report.timings = timer.timings
    return report


def run_spectrum(config: JobConfig, tol_scale: float = 1.0) -> IdentityReport:
    """Exact joint spectrum of the magnets, plus ``H(λ)`` spectra where defined."""
    report = IdentityReport("spectrum", metadata=config.describe())
    timer = _Timer()
    with timer("joint"):
        mags = magnet.build_magnets(config.system, config.family)
        joint = magnet.simultaneous_spectrum(mags, include_total_sz=True, seed=config.seed)
    report.add("joint_spectrum", joint.max_residual, config.tolerance("joint_spectrum", tol_scale), ANCHORS["joint_spectrum"])
    order = np.lexsort(tuple(np.round(joint.eigenvalues[:, k], 10) for k in reversed(range(joint.n_ops))))
    report.tables["joint"] = [
        {label: float(joint.eigenvalues[r, c]) for c, label in enumerate(joint.labels)} for r in order
    ]
    if config.family.tag in (Family.RATIONAL, Family.Q_DEFORMED) and config.lambdas:
        real = _bethe_realization(config)
        rows = []
        for lam in config.lambdas:
            h = algebra.spectral_operator(real, lam)
            ev = np.linalg.eigvals(h)
            ev = ev[np.lexsort((np.round(ev.imag, 10), np.round(ev.real, 10)))]
            rows.append({"lambda": lam, "eigenvalues": ev})
        report.tables["H_lambda"] = rows
    report.timings = timer.timings
    return report


def run_nogo(config: JobConfig, tol_scale: float = 1.0) -> IdentityReport:
    """Least-squares search for a standard r-matrix over a grid of q values."""
    from .config import ConfigError

    if config.family.tag is not Family.Q_DEFORMED:
        raise ConfigError("the nogo command needs a q-deformed family config")
    if config.system.n_sites < 2:
        raise ConfigError("the nogo command needs at least two sites")
    mu = config.mu
    lam = mu + config.lambda_minus_mu
    report = IdentityReport(
        "nogo",
        metadata={**config.describe(), "lambda": lam, "mu": mu, "lambda_minus_mu": config.lambda_minus_mu},
    )
    timer = _Timer()
    rows = []
    with timer("probe"):
        for q in config.q_grid:
            real = Realization.rational(config.system) if q == 0 else Realization.coth(config.system, q)
            res = rmatrix.no_go_probe(real, lam, mu)
            rows.append(
                {
                    "q": q,
                    "residual": res.residual,
                    "rank": res.rank,
                    "r23_constraint_a": res.r23_constraints[0],
                    "r23_constraint_b": res.r23_constraints[1],
                    "r23_gap": res.r23_gap,
                    "r": res.r,
                }
            )
            if q == 0:
                report.add("nogo_zero", res.residual, config.tolerance("nogo_zero", tol_scale), ANCHORS["nogo_zero"])
                err = float(np.max(np.abs(res.r - rmatrix.rational_r(lam - mu))))
                report.add("nogo_recovery", err, config.tolerance("nogo_recovery", tol_scale), ANCHORS["nogo_recovery"])
            else:
                # gap bound: residual must exceed slope * |q|
                report.add(
                    f"nogo_gap[q={q:g}]",
                    res.residual,
                    config.tolerance("nogo_gap_slope") * abs(q),
                    ANCHORS["nogo_gap_slope"],
                    comparison=">=",
                )
    by_q = sorted(rows, key=lambda r: abs(r["q"]))
    report.metadata["residual_monotone_in_abs_q"] = all(
        b["residual"] >= a["residual"] - 1e-12 for a, b in zip(by_q, by_q[1:])
    )
    report.tables["nogo"] = rows
    report.timings = timer.timings
    return report


def _root_set_distance(a, b) -> float:
    return float(np.max(np.abs(np.sort_complex(np.asarray(a)) - np.sort_complex(np.asarray(b)))))


def _family_with_param(family: CouplingFamily, value: float) -> CouplingFamily:
    return CouplingFamily(family.tag, value)


def run_sweep(config: JobConfig, tol_scale: float = 1.0) -> IdentityReport:
    """Continuation in the family parameter (``p`` or ``q``).

    For q-deformed configs with ``n`` set, Bethe roots at each grid value are
    seeded from the previous value's roots, so branches can be followed.
    """
    from .config import ConfigError

    if config.family.tag is Family.RATIONAL:
        raise ConfigError("the sweep command needs a parametric family")
    values = config.sweep_values or (config.family.param,)
    report = IdentityReport("sweep", metadata={**config.describe(), "values": list(values), "n": config.n})
    timer = _Timer()
    rows = []
    previous: Optional[list] = None
    for value in values:
        fam = _family_with_param(config.family, value)
        with timer("magnets"):
            mags = magnet.build_magnets(config.system, fam)
            hs = mags.hamiltonians
            comm = max(magnet.commutator_norm(a, b) for a, b in itertools.combinations(hs, 2))
            rule = magnet.sum_rule_check(mags)
        report.add(f"commutativity[{value:g}]", comm, config.tolerance("commutativity", tol_scale), ANCHORS["commutativity"])
        report.add(f"sum_rule[{value:g}]", rule, config.tolerance("sum_rule", tol_scale), ANCHORS["sum_rule"])
        row = {"param": value, "max_commutator": comm, "sum_rule_residual": rule}
        if fam.tag is Family.Q_DEFORMED and config.n is not None:
            real = Realization.coth(config.system, value)
            with timer("bethe"):
                seeds = bethe.default_seeds(real, config.n, seed=config.seed)
                if previous:
                    seeds = [np.asarray(r) for r in previous] + seeds
                states = bethe.solve_bethe(real, config.n, seeds=seeds).states
            roots = [list(s.roots) for s in states]
            row["roots"] = roots
            if previous and roots:
                row["max_root_shift"] = max(min(_root_set_distance(r, p) for p in previous) for r in roots)
            previous = roots
        rows.append(row)
    report.tables["sweep"] = rows
    report.timings = timer.timings
    return report
