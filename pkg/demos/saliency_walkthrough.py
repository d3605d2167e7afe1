"""From exported activations and gradients to a normalized saliency map.

Given the final-convolution activations of a classifier and the
gradients of the chosen class logit with respect to them, the saliency
map is built in three steps: average each gradient channel into a
neuron weight, combine the activation channels with those weights and
clip negatives, then upsample to scan resolution and rescale to [0, 1].
This script runs the steps one at a time on a small fabricated export.
"""

import numpy as np

from layerfocus import (
    compute_saliency,
    gradcam_coarse,
    neuron_weights,
    normalize_minmax,
    resize_bilinear,
)

rng = np.random.default_rng(7)

# pretend the classifier's last conv block had a 6x6 map with 4 channels
acts = rng.uniform(0.0, 2.0, size=(6, 6, 4))
grads = rng.normal(0.0, 1.0, size=(6, 6, 4))

weights = neuron_weights(grads)
print("per-channel weights (spatial mean of each gradient channel):")
print(" ", np.round(weights, 4))

coarse = gradcam_coarse(acts, weights)
print(f"\ncoarse map: shape {coarse.shape}, "
      f"{int((coarse == 0).sum())} of {coarse.size} cells clipped at zero")

upsampled = resize_bilinear(coarse, 24, 24)
saliency = normalize_minmax(upsampled)
print(f"upsampled to {upsampled.shape}, normalized span "
      f"[{saliency.min():.3f}, {saliency.max():.3f}]")

# the one-call version is the same composition
assert np.allclose(saliency, compute_saliency(acts, grads, 24, 24), atol=1e-12)
print("\ncompute_saliency(acts, grads, 24, 24) reproduces the manual steps")

# scaling the gradients by any positive factor cannot move the map:
# the weights scale, the coarse map scales, normalization divides it out
scaled = compute_saliency(acts, grads * 1000.0, 24, 24)
print(f"gradient rescale changes the map by {np.abs(scaled - saliency).max():.2e}")
