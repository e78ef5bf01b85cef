from tqdm import tqdm
import os
import argparse

from swe_symmetry import reductions as red
from swe_symmetry.config import load_fixture, FIXTURES
from swe_symmetry.ode_num import integrate_adaptive
from swe_symmetry.swe_models import build


REDUCTIONS = {
    "travelling_wave": red.derive_travelling_wave,
    "equator_y4y5": red.derive_equator_y4y5,
}


def show_trajectories(trajs, name, outdir=None):
    import matplotlib
    if outdir is not None:
        matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, axes = plt.subplots(1, 3, figsize=(12, 3.5), sharex=True)
    for k, traj in enumerate(trajs):
        for i, (ax, label) in enumerate(zip(axes, traj.labels)):
            ax.plot(traj.z, traj.states[:, i], label="run {}".format(k))
            ax.set_title(label)
            ax.set_xlabel(traj.independent)
            for ev in traj.events:
                ax.axvline(ev.location, color="k", lw=0.5, ls="--")

    axes[0].legend()
    fig.suptitle(name)
    fig.tight_layout()

    if outdir is None:
        plt.show()
    else:
        os.makedirs(outdir, exist_ok=True)
        fig.savefig(os.path.join(outdir, "{}.png".format(name)), dpi=150)


if __name__ == '__main__':
    parser = argparse.ArgumentParser()
    parser.add_argument("--figure", default="equator_y4y5", help="entry of figure_ics.json")
    parser.add_argument("--fixtures", default=FIXTURES)
    parser.add_argument("--rel_tol", type=float, default=1e-8)
    parser.add_argument("--outdir", help="save the plot here instead of showing it")
    args = parser.parse_args()

    fig = load_fixture("figure_ics", args.fixtures)[args.figure]
    ode = REDUCTIONS[fig["reduction"]](build(fig["system"]))
    print(ode.to_json())

    trajs = []
    for run in tqdm(fig["runs"]):
        y0 = [run["H"], run["U"], run["V"]]
        traj = integrate_adaptive(ode, y0, *fig["span"], params=fig["params"], rel_tol=args.rel_tol)
        for ev in traj.events:
            print("{} event at {} = {:.10g}, |locus| = {:.2e}".format(
                ev.locus, traj.independent, ev.location, abs(ev.value)))
        trajs.append(traj)

    show_trajectories(trajs, args.figure, args.outdir)
