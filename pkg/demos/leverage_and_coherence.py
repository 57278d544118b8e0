"""
Leverage scores and coherence
=============================

Leverage scores measure how much each row matters to the column space.
Coherence (the largest score) decides whether uniform row sampling can
work at all: a single row carrying a score near 1 is invisible to
uniform sampling until s approaches N.
"""

import numpy as np

from levsketch import (
    ProblemSpec,
    generate_problem,
    leverage_distribution,
    leverage_scores,
    misestimation_beta,
    uniform_distribution,
)

# incoherent case: iid Gaussian rows share the leverage evenly
a, _, _ = generate_problem(ProblemSpec("gaussian-incoherent", 5000, 5, seed=11))
profile = leverage_scores(a)
print("gaussian design, 5000 x 5")
print(f"  sum of scores = {profile.scores.sum():.12f} (always the rank)")
print(f"  coherence     = {profile.coherence:.5f} (floor r/N = {5/5000:.4f})")

# uniform sampling is nearly as good as leverage sampling here: beta is
# the factor by which a distribution underweights the worst row
uni = uniform_distribution(profile.n_rows)
print(f"  uniform beta  = {misestimation_beta(uni, profile):.4f}")

# coherent case: one planted row soaks up 99% of a direction
a, _, meta = generate_problem(
    ProblemSpec("spiked-coherent", 5000, 5, coherence_target=0.99, seed=11)
)
profile = leverage_scores(a)
print("spiked design, 5000 x 5, planted coherence 0.99")
print(f"  coherence     = {profile.coherence:.5f}")
print(f"  uniform beta  = {misestimation_beta(uni, profile):.6f}")
print("  (sample counts scale with 1/beta, so uniform needs ~"
      f"{1 / misestimation_beta(uni, profile):.0f}x more rows here)")

# leverage sampling is immune by construction: it matches the scores
lev = leverage_distribution(profile)
print(f"  leverage beta = {lev.beta}")

top = np.argsort(profile.scores)[-3:][::-1]
print("  three highest-leverage rows:", top,
      "scores", np.round(profile.scores[top], 4))
