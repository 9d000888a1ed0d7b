"""High-level syzlab client."""

from __future__ import annotations

from typing import Dict, Iterable, List, Optional, Union

import numpy as np
from typing_extensions import TypeAlias

from . import curvemodel, koszul, lattice, moduli
from .config import SyzlabSettings
from .curvemodel import HyperellipticCurve
from .exceptions import ParameterError
from .koszul import BettiTable, LineBundleModel, ScrollSyzygies
from .lattice import Certificate
from .logging_config import log_action, log_verdicts

ModelLike: TypeAlias = Union[str, LineBundleModel]


class Syzlab:
    """Coordinates curve models, Koszul computations, lattice certificates and moduli identities."""

    def __init__(self, *, settings: Optional[SyzlabSettings] = None) -> None:
        self.settings = settings or SyzlabSettings.from_env()

    # region configuration helpers -------------------------------------------------
    def configure(self, **kwargs: object) -> None:
        for key, value in kwargs.items():
            if not hasattr(self.settings, key):
                raise AttributeError(f"Unknown syzlab setting '{key}'")
            setattr(self.settings, key, value)

    def model(self, spec: ModelLike) -> LineBundleModel:
        if isinstance(spec, LineBundleModel):
            return spec
        return koszul.parse_model_spec(spec, self.settings.prime, self.settings.seed)

    def _rng(self, seed: Optional[int]) -> np.random.Generator:
        return np.random.default_rng(self.settings.seed if seed is None else seed)

    # region Koszul cohomology -----------------------------------------------------
    @log_action("Koszul Dimension", log_result=True)
    def koszul_dim(self, model: ModelLike, p: int, q: int) -> int:
        return koszul.koszul_dim(
            self.model(model), p, q,
            wedge_cap=self.settings.wedge_cap, dense_fill=self.settings.dense_fill,
        )

    @log_action("Betti Table")
    def betti(self, model: ModelLike, pmax: int, qmax: int) -> BettiTable:
        return koszul.betti_table(
            self.model(model), pmax, qmax,
            wedge_cap=self.settings.wedge_cap, dense_fill=self.settings.dense_fill,
        )

    @log_action("Betti Checks")
    def betti_checks(self, table: BettiTable, model: ModelLike) -> Dict[str, bool]:
        """Naturality, and the diagonal identity when ``L`` is nonspecial with ``d > g``."""
        m = self.model(model)
        verdicts = {}
        if table.qmax >= 2:
            verdicts["naturality"] = koszul.naturality_check(table)
            if m.nonspecial and m.degree > m.genus:
                verdicts["euler_diagonal"] = koszul.euler_diagonal_check(table, m.genus, m.degree)
        log_verdicts("Betti Checks", verdicts)
        return verdicts

    @log_action("Oracle Equivalence")
    def oracle_suite(self, seed: Optional[int] = None) -> Dict[str, object]:
        rows: List[Dict[str, object]] = []
        for model, pmax, qmax, steps in koszul.oracle_suite_models(
            self.settings.prime, self.settings.seed if seed is None else seed
        ):
            agree, mismatches = koszul.oracle_agreement(model, pmax, qmax, steps)
            rows.append({"model": model.name, "agree": agree, "mismatches": mismatches})
        log_verdicts("Oracle Equivalence", {str(r["model"]): bool(r["agree"]) for r in rows})
        return {"models": rows, "all_agree": all(r["agree"] for r in rows)}

    @log_action("Prym-Green")
    def prym_green(
        self, g: int, *, compute: bool = False, seed: Optional[int] = None
    ) -> Dict[str, object]:
        """Predicted table, plus the table of a hyperelliptic Prym-canonical model on request."""
        predicted = koszul.prym_green_predicted(g)
        out: Dict[str, object] = {"predicted": predicted}
        if compute:
            s = self.settings.seed if seed is None else seed
            model = self.model(f"prym g={g} seed={s}")
            computed = self.betti(model, g - 2, 2)
            out["computed"] = computed
            out["model"] = model.name
            out["caveat"] = "hyperelliptic model; the prediction concerns general curves"
            out["matches_prediction"] = computed.entries == predicted.entries
        return out

    @log_action("Scroll Syzygies", log_result=True)
    def scroll(self, g: int, seed: Optional[int] = None) -> ScrollSyzygies:
        rng = self._rng(seed)
        c = HyperellipticCurve.random(g, self.settings.prime, rng)
        d = c.random_effective_divisor(2 * g, rng)
        return koszul.scroll_syzygies(c, d, int(rng.integers(0, 2**31)))

    @log_action("Reduction by One")
    def reduction_by_one(self, g: int, degree: int, p: int,
                         seed: Optional[int] = None) -> Dict[str, object]:
        rng = self._rng(seed)
        c = HyperellipticCurve.random(g, self.settings.prime, rng)
        d = c.random_effective_divisor(degree, rng)
        x = d.places()[0]
        return koszul.reduction_by_one_check(c, d, p, x, int(rng.integers(0, 2**31)))

    # region secant loci -------------------------------------------------------------
    @log_action("Divisorial Secant Suite")
    def secant_suite(
        self, samples: int = 100, hyperelliptic_samples: int = 20, seed: Optional[int] = None
    ) -> Dict[str, object]:
        report = koszul.divisorial_secant_suite(
            self.settings.prime,
            self.settings.seed if seed is None else seed,
            samples=samples,
            hyperelliptic_samples=hyperelliptic_samples,
        )
        log_verdicts("Divisorial Secant Suite", {
            "no_mismatches": not report["mismatches"],
            "hyperelliptic_lhs_nonzero": bool(report["hyperelliptic_lhs_nonzero"]),
        })
        return report

    @log_action("Difference Variety Suite")
    def diffvar_suite(self, instances: int = 200, seed: Optional[int] = None) -> Dict[str, object]:
        return curvemodel.difference_variety_suite(
            self.settings.prime,
            self.settings.seed if seed is None else seed,
            instances=instances,
            trial_budget=self.settings.trial_budget,
        )

    @log_action("Genus 4 Difference Check")
    def diffcon_g4(self, seed: Optional[int] = None) -> Dict[str, object]:
        rng = self._rng(seed)
        curve = curvemodel.genus4_sample(self.settings.prime, rng)
        return curvemodel.diffcon_g4_check(curve, rng)

    @log_action("Torsion Scan")
    def scan_torsion(
        self, g: int = 7, crosscheck: int = 50, seed: Optional[int] = None
    ) -> Dict[str, object]:
        if g < 3 or g % 2 == 0:
            raise ParameterError("the torsion scan needs odd g >= 3")
        rng = self._rng(seed)
        c = HyperellipticCurve.random(g, self.settings.prime, rng)
        return curvemodel.torsion_scan(c, (g - 3) // 2, crosscheck, int(rng.integers(0, 2**31)))

    # region lattices ------------------------------------------------------------------
    @log_action("Certify Lemma", log_result=True)
    def certify(self, lemma_id: str, **params: int) -> Certificate:
        return lattice.certify(lemma_id, params)

    @log_action("Certify Grid")
    def certify_grid(self, lemma_id: str, g_max: int = 41, p_max: int = 20) -> List[Certificate]:
        certs = lattice.certify_grid(lemma_id, g_max, p_max)
        log_verdicts(lemma_id, {str(c.params): c.passed for c in certs})
        return certs

    # region moduli ----------------------------------------------------------------------
    @log_action("Moduli Identities")
    def moduli_reports(self, values: Iterable[int]) -> List[Dict[str, object]]:
        return [moduli.div_class_report(i) for i in values]

    @log_action("GRR Consistency", log_result=True)
    def grr_check(self, ell_max: int = 10, i: int = 1) -> Dict[int, bool]:
        return {ell: moduli.grr_expand(ell, i) == moduli.c1_G0(ell, i)
                for ell in range(1, ell_max + 1)}
