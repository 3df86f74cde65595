"""
Epsilon-insensitive regression
==============================

Errors smaller than epsilon are free; only points on or outside the tube
carry weight in the expansion.
"""
import numpy as np

from ksvm import KernelSpec, SolverConfig, train_svr
from ksvm.regress import epsilon_loss

# two points, a wide tube: the flattest line through the band
m = train_svr([[0.0], [1.0]], [1.0, 3.0], KernelSpec.linear(), C=100.0, epsilon=0.5, config=SolverConfig(tol=1e-9))
print("f(0) = %.4f, f(1) = %.4f" % tuple(m.predict([[0.0], [1.0]])))

# noiseless sine on 30 points
x = np.linspace(0, 2 * np.pi, 30)[:, None]
y = np.sin(x[:, 0])
for eps in (0.0, 0.05, 0.1, 0.5, 1.0):
    m = train_svr(x, y, KernelSpec.gaussian(1.0), C=100.0, epsilon=eps)
    resid = np.abs(m.predict(x) - y)
    print(f"eps={eps:<4} n_sv={m.n_sv:2d}  max residual {resid.max():.4f}  eps-risk {epsilon_loss(y, m.predict(x), eps).mean():.2e}")

# shifting the targets only moves the bias
a = train_svr(x, y, KernelSpec.gaussian(1.0), C=10.0, epsilon=0.1)
b = train_svr(x, y + 5.0, KernelSpec.gaussian(1.0), C=10.0, epsilon=0.1)
print("bias shift:", b.b - a.b)
