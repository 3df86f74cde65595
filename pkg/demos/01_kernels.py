"""
Kernels and Gram matrices
=========================

The three closed-form kernels, checked against an explicit feature map.
"""
import numpy as np

from ksvm import KernelSpec, SparseVector, eval_kernel, gram

rng = np.random.default_rng(0)
X = rng.normal(size=(5, 2))

# (1 + x.y)^2 in two dimensions is an inner product of six features
def phi(x):
    r2 = np.sqrt(2.0)
    return np.array([1.0, r2 * x[0], r2 * x[1], x[0] ** 2, x[1] ** 2, r2 * x[0] * x[1]])


K = gram(KernelSpec.polynomial(1.0, 2), X)
F = np.array([phi(x) for x in X])
print("max |K - Phi Phi'| =", np.abs(K - F @ F.T).max())

# the gaussian width divides the squared distance: c = 200 is gamma = 0.005
g = KernelSpec.parse("gauss:c=200")
print(g, "gamma =", g.gamma)
print("K(x, x) =", eval_kernel(g, X[0], X[0]))

# every Gram matrix is symmetric positive semidefinite
for spec in (KernelSpec.linear(), KernelSpec.polynomial(1.0, 3), g):
    eig = np.linalg.eigvalsh(gram(spec, rng.normal(size=(40, 3))))
    print(f"{str(spec):<16} smallest eigenvalue {eig[0]: .2e}")

# sparse samples give the same values as their dense twins
a = SparseVector.from_dict({3: 0.5, 7: 1.0})
b = SparseVector.from_dict({1: 2.0, 7: -1.0}, dim=9)
print("sparse dot", a.dot(b), "dense dot", a.to_dense(9) @ b.to_dense())
