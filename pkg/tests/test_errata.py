import pytest
import sympy as sp

from swe_symmetry.catalog import catalog, by_label
from swe_symmetry.errata import (Errata, STATIC_ERRATA, candidate_edits, search_corrections,
                                 verify_catalog, advection_readings, verified_fields)
from swe_symmetry.lie_engine import VectorField, is_symmetry
from swe_symmetry.swe_models import build
from swe_symmetry.symbolic import symbols as S
from swe_symmetry.symbolic.expr import normalize


class TestLedger:
    def test_static_entries(self):
        errata = Errata()
        assert len(errata.entries) == len(STATIC_ERRATA)
        assert {"advection", "y5-d-V", "table6-ch22"} <= set(errata.ids())

    def test_sorted_output(self):
        errata = Errata()
        errata.add("aaa", "here", "p", "a", "e")
        ids = [e["id"] for e in errata.to_json()]
        assert ids == sorted(ids)
        assert ids[0] == "aaa"


class TestCandidateEdits:
    def test_kinds(self):
        V = VectorField(label="V", u=S.Omega*S.u, h=S.Omega)
        kinds = {c.kind for c, _, _, _ in candidate_edits(V)}
        assert kinds == {"swap-uv", "insert-h", "flip-sign", "double", "halve"}

    def test_insert_h_only_in_height_slot(self):
        V = VectorField(label="V", u=S.Omega, h=S.Omega)
        slots = {c.slot for c, _, _, _ in candidate_edits(V) if c.kind == "insert-h"}
        assert slots == {"h"}

    def test_difference_fields(self):
        V = VectorField(label="V", v=S.u*sp.cos(S.t))
        for corr, slot, changed, delta in candidate_edits(V):
            assert normalize(delta[slot] - (changed - V[slot])) == 0


class TestPoleCorrections:
    def test_all_verify_after_corrections(self, pole_verification):
        _, results, _ = pole_verification
        assert all(r.verified for r in results)
        corrected = {r.label for r in results if r.corrected is not None}
        assert corrected == {"Z8", "Z9"}

    def test_z8_swap(self, pole_verification):
        _, results, _ = pole_verification
        z8 = next(r for r in results if r.label == "Z8")
        assert [(c.kind, c.slot) for c in z8.corrected.corrections] == [("swap-uv", "v")]

    def test_z8_corrected_component(self, pole_verification):
        _, results, _ = pole_verification
        field = next(r for r in results if r.label == "Z8").field
        s, c = sp.sin(2*S.Omega*S.t), sp.cos(2*S.Omega*S.t)
        expected = -S.Omega*(S.u*s + S.v*c + 2*S.Omega*(S.y*s + S.x*c))
        assert normalize(field["v"] - expected) == 0

    def test_z9_two_edits(self, pole_verification):
        _, results, _ = pole_verification
        z9 = next(r for r in results if r.label == "Z9")
        corrections = z9.corrected.corrections
        assert len(corrections) == 2
        assert {c.slot for c in corrections} == {"v", "h"}
        assert "insert-h" in {c.kind for c in corrections}

    def test_corrected_fields_are_symmetries(self, pole_verification, systems):
        gens, results, _ = pole_verification
        for V in verified_fields(results, gens):
            assert is_symmetry(V, systems["pole"]), V.label

    def test_ledger_records_corrections(self, pole_verification):
        _, _, errata = pole_verification
        assert {"correction-z8", "correction-z9"} <= set(errata.ids())

    def test_search_returns_none_without_fix(self, systems):
        V = VectorField(label="x*d_x", x=S.x)
        assert search_corrections(V, systems["general"], max_depth=1) is None


class TestAdvection:
    def test_rotation_needs_corrected_reading(self):
        Z5 = by_label(catalog("pole"))["Z5"]
        readings = advection_readings([Z5], build("pole"), build("pole", "literal"))
        assert readings["Z5"] == {"corrected": True, "literal": False}

    def test_translations_verify_under_both(self):
        gens = catalog("general")
        readings = advection_readings(gens, build("general"), build("general", "literal"))
        assert all(r["corrected"] and r["literal"] for r in readings.values())


class TestVerifyCatalog:
    def test_without_search(self, systems):
        results = verify_catalog(catalog("pole"), systems["pole"], search=False)
        failed = {r.label for r in results if not r.verified}
        assert failed == {"Z8", "Z9"}
        assert all(r.corrected is None for r in results)
