import pytest

from swe_symmetry import algebra_tables as at
from swe_symmetry.catalog import catalog
from swe_symmetry.config import load_fixture
from swe_symmetry.errata import Errata, verify_catalog, verified_fields
from swe_symmetry.swe_models import build


@pytest.fixture(scope="session")
def systems():
    return {label: build(label) for label in ("general", "equator", "pole")}


@pytest.fixture(scope="session")
def pole_verification(systems):
    errata = Errata()
    gens = catalog("pole")
    results = verify_catalog(gens, systems["pole"], search=True, errata=errata)
    return gens, results, errata


@pytest.fixture(scope="session")
def algebras(pole_verification):
    gens, results, _ = pole_verification
    return {
        "general": at.structure_constants(catalog("general"), name="general"),
        "equator": at.structure_constants(catalog("equator"), name="equator"),
        "pole": at.structure_constants(verified_fields(results, gens), name="pole"),
    }


@pytest.fixture(scope="session")
def fixtures():
    return lambda name: load_fixture(name)
