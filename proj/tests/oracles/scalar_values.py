# Copyright (c) 2026, The neuron-io authors
# SPDX-License-Identifier: Apache-2.0

"""Reference values for the activation functions and the double-checking grid,
evaluated with mpmath at 30 digits."""
import mpmath as mp

mp.mp.dps = 30
swish = lambda x: x / (1 + mp.e ** (-x))
gelu = lambda x: x * mp.ncdf(x)
print("swish(1)  =", mp.nstr(swish(1), 20))
print("swish(-1) =", mp.nstr(swish(-1), 20))
print("gelu(-1)  =", mp.nstr(gelu(-1), 20))
print("gelu(1)   =", mp.nstr(gelu(1), 20))

# w_gate = e1, w_in = e2: activation = swish(x1) * x2 on the 81x81 grid over [-4, 4]
ref = swish(1)
viol = []
for i in range(81):
    for j in range(81):
        x1 = mp.mpf(-4) + mp.mpf(i) / 10
        x2 = mp.mpf(-4) + mp.mpf(j) / 10
        if x1 <= -1 or x2 <= 0:
            a = swish(x1) * x2
            if a >= ref:
                viol.append((float(x1), float(x2), float(a)))
print("grid violations:", len(viol))
if viol:
    print("worst:", max(viol, key=lambda t: t[2]))
    print("all in third quadrant:", all(x1 < 0 and x2 < 0 for x1, x2, _ in viol))
