"""
Two separable clouds and the role of C
======================================

2000 points from N((0,0), I) and N((10,10), I).  With C = 1 a handful of
support vectors define the line; as C shrinks almost every point becomes one.
"""
import numpy as np

from ksvm import BlobSpec, SolverConfig, gen_blobs, train_svc
from ksvm.classify import empirical_risks, linear_hyperplane

data = gen_blobs(BlobSpec(((0.0, 0.0), (10.0, 10.0)), 1000, seed=1))
cfg = SolverConfig(tol=1e-4)

model = train_svc(data.X, data.y, C=1.0, config=cfg)
w, b, line = linear_hyperplane(model)
print("support vectors:", model.n_sv)
print("native line      %.3fx %+.3fy %+.3f = 0" % (w[0], w[1], b))
print("normalised line  %.3fx %+.3fy %+.3f = 0" % tuple(line))
print("training error:", empirical_risks(model, data.X, data.y).error_rate)

# smaller C, softer margin, more support vectors
for C in (1.0, 0.01, 1e-5):
    m = train_svc(data.X, data.y, C=C, config=cfg)
    print(f"C={C:<8g} n_sv={m.n_sv:5d}  ({100 * m.n_sv / len(data):.1f}% of the sample)")

# each free support vector sits on the margin: y D(x) = 1
free = model.free_mask()
print("y D(x) at free SVs:", np.round(data.y[model.support][free] * model.decision_function(model.support_vectors[free]), 4))
