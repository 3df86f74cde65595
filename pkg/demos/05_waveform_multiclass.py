"""
Waveform data, one against one
==============================

Three classes built from shifted triangular waves plus unit noise.  Three
pairwise gaussian machines vote; 400 samples train, 4600 test.
"""
import numpy as np

from ksvm import KernelSpec, WaveformSpec, gen_waveform, split_counts, train_ovo
from ksvm.data import waveform_basis
from ksvm.multiclass import vote_tally

print("h1, h2, h3 at i=11:", waveform_basis(11))

errors = []
for seed in range(5):
    data = gen_waveform(WaveformSpec(5000, seed=seed))
    train, test = split_counts(data, 400, seed=seed)
    model = train_ovo(train.X, train.y, KernelSpec.gaussian(200.0), C=1.0)
    tr = np.mean(model.predict(train.X) != train.y)
    te = np.mean(model.predict(test.X) != test.y)
    errors.append((tr, te))
    print(f"seed {seed}: train {100 * tr:.1f}%  test {100 * te:.1f}%")
print("mean train %.2f%%, mean test %.2f%%" % tuple(100 * np.mean(errors, axis=0)))

# every prediction comes from exactly three votes
votes, strength = vote_tally(model, test.X[:5])
print(votes)
