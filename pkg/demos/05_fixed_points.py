"""
Approximate fixed points from sign labels
=========================================

"""

import numpy as np
from fractions import Fraction as F
from spernerkit.fixedpoint import (
    make_map, sign_labeling, brouwer_approx, coordinate_fixed_experiment, shift_map,
)
from spernerkit.labelings import check_cubical_sperner

f = make_map("rotate", 2)
print(sign_labeling(f, 6).colours)   # two bits per vertex
print(check_cubical_sperner(sign_labeling(f, 6)))

for m in (8, 16, 32, 64):
    r = brouwer_approx(f, m)
    print(m, [str(c) for c in r.point], float(r.residual), float(r.residual) * m)

# a quadratic per axis; the residual is not monotone at every step
g = make_map("poly", 2, {"coeffs": "1/5,0,1/2"})
print(np.array([float(brouwer_approx(g, m).residual) for m in (8, 16, 32, 64)]))

# shifting one axis: the others stay put.  Near the top face the shift is
# clipped, so a wide enough eps counts the shifted axis as fixed too
h = shift_map(4, axis=0, amount=F(1, 4))
for eps in (F(1, 32), F(1, 16), F(1, 8)):
    exp = coordinate_fixed_experiment(h, eps, 16)
    print(eps, exp.to_dict()["fixed_coords"], [str(c) for c in exp.point])
