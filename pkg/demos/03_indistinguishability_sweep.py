"""
Can the agents tell the two worlds apart?
=========================================

Everything Alice and Bob can learn is the distribution of classical
transcripts their protocol produces.  This demo compares, script by
script, the transcript distribution of the identified-pair world against
the channel-delivered world, in total variation distance.

At zero coupling every bundled protocol -- projective measurements at
assorted angles, randomized CHSH settings, unsharp and noisy instruments,
adaptive multi-round scripts -- produces distance zero to numerical
precision: no experiment the agents can run distinguishes a direct
identification from a decoherence-free channel.  With coupling switched
on, the channel betrays itself exactly to the extent it decoheres.
"""

from locclab import (
    EprParams,
    accessible_distribution,
    build_epr_world,
    build_er_world,
    bundled_corpus,
    canonical_chsh_script,
    sweep_columnar,
    indistinguishability_sweep,
    total_variation,
)


def main():
    er = build_er_world()
    epr0 = build_epr_world(q_dim=2, qbar_dim=2, lam=0.0, seed=0)

    print("transcript distance at zero coupling, per bundled script:")
    for script in bundled_corpus():
        tvd = total_variation(
            accessible_distribution(epr0, script), accessible_distribution(er, script)
        )
        print(f"  {script.name:<16} {tvd:.2e}")

    print("\nsweeping the coupling with the randomized-settings CHSH script:")
    rows = indistinguishability_sweep(
        [0.0, 0.15, 0.3, 0.45, 0.6, 0.75, 0.9],
        canonical_chsh_script(),
        EprParams(q_dim=2, qbar_dim=2, seed=0),
    )
    print(sweep_columnar(rows))
    print("distance from the identified world rises exactly as |S| and purity fall.")


if __name__ == "__main__":
    main()
