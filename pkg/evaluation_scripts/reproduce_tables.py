import os
import argparse

from tqdm import tqdm

from swe_symmetry import algebra_tables as at
from swe_symmetry.catalog import catalog
from swe_symmetry.cli import TABLES, ADJOINT_SAMPLES
from swe_symmetry.config import load_fixture, FIXTURES
from swe_symmetry.errata import Errata, verify_catalog, verified_fields
from swe_symmetry.swe_models import build


def evaluate(system, fixtures, outdir=None):
    errata = Errata()
    gens = catalog(system)
    results = verify_catalog(gens, build(system), errata=errata, progress=tqdm)
    alg = at.structure_constants(verified_fields(results, gens), name=system)

    comm_name, adj_names = TABLES[system]
    reports = [at.commutator_compare(alg, load_fixture(comm_name, fixtures))]
    reports += [at.adjoint_compare(alg, load_fixture(n, fixtures), ADJOINT_SAMPLES[system])
                for n in adj_names]

    for rep in reports:
        print(rep.to_text())
        print()
        if outdir is not None:
            with open(os.path.join(outdir, rep.name + ".txt"), "w") as fp:
                fp.write(rep.to_text() + "\n")

    print("{} flags: {}".format(system, at.structure_flags(alg)))
    return reports


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument("--systems", nargs="+", default=["general", "equator", "pole"])
    parser.add_argument("--fixtures", default=FIXTURES)
    parser.add_argument("--outdir")
    args = parser.parse_args()

    if args.outdir is not None:
        os.makedirs(args.outdir, exist_ok=True)

    summary = {}
    for system in args.systems:
        print("Running table comparison on the {} system".format(system))
        for rep in evaluate(system, args.fixtures, args.outdir):
            summary[rep.name] = rep.summary()

    for name, s in sorted(summary.items()):
        print("{:8s} {}".format(name, s))
