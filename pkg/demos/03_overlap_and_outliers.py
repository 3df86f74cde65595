"""
Overlapping clouds, Bayes error and far-away points
===================================================

Means (0,0) and (4,0) overlap; the Bayes rule x < 2 errs 2.27% of the time.
Adding points far on the correct side leaves the machine untouched.
"""
import numpy as np

from ksvm import BlobSpec, SolverConfig, gen_blobs, train_svc
from ksvm.classify import decision_values, linear_hyperplane, predict_labels

means = ((0.0, 0.0), (4.0, 0.0))
train = gen_blobs(BlobSpec(means, 500, seed=3))
test = gen_blobs(BlobSpec(means, 10_000, seed=4))

model = train_svc(train.X, train.y, C=2.0)
err = np.mean(predict_labels(model, test.X) != test.y)
bayes = np.mean(np.where(test.X[:, 0] < 2.0, -1, 1) != test.y)
w, b, _ = linear_hyperplane(model)
print(f"SVM test error {100 * err:.2f}%   Bayes rule {100 * bayes:.2f}%")
print(f"SV fraction {100 * model.n_sv / len(train):.1f}%")
print("line scaled by -b: %.3fx + %.3fy - 1 = 0" % tuple(-w / b))

# two points at (-8, +-1), labelled with the left cloud
cfg = SolverConfig(tol=1e-9)
base = train_svc(train.X, train.y, C=2.0, config=cfg)
X2 = np.vstack([train.X, [[-8.0, 1.0], [-8.0, -1.0]]])
y2 = np.r_[train.y, -1, -1]
more = train_svc(X2, y2, C=2.0, config=cfg)
grid = np.stack(np.meshgrid(np.linspace(-3, 7, 10), np.linspace(-4, 4, 10)), -1).reshape(-1, 2)
print("max change on the probe grid:", np.abs(decision_values(more, grid) - decision_values(base, grid)).max())
print("outlier margins y D(x):", y2[-2:] * decision_values(more, X2[-2:]))
