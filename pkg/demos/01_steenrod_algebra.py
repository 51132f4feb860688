"""Admissible basis, Adem straightening and the antipode in low degrees."""
from __future__ import annotations

from adamsext.steenrod import Sq, adem_reduce, admissible_basis, antipode, dimension, multiply

# %% admissible monomials by degree
for t in range(9):
    print(t, dimension(t), admissible_basis(t))

# %% products are straightened into the admissible basis
print("Sq2 Sq2 =", adem_reduce([2, 2]))
print("Sq2 Sq4 =", adem_reduce([2, 4]))
print("Sq3 Sq2 =", adem_reduce([3, 2]))
print("(Sq4 Sq2) Sq1 =", multiply(Sq(4, 2), Sq(1)))

# %% antipode on single squares
for n in range(1, 7):
    print(f"chi(Sq{n}) =", antipode(n))
