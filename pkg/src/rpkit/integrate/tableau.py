"""Dormand-Prince 5(4) coefficients with Shampine's quartic dense output.

Exact rationals are kept alongside the float copies so tests can check the
order conditions without rounding.
"""

from fractions import Fraction as F

C_EXACT = (F(0), F(1, 5), F(3, 10), F(4, 5), F(8, 9), F(1), F(1))

A_EXACT = (
    (),
    (F(1, 5),),
    (F(3, 40), F(9, 40)),
    (F(44, 45), F(-56, 15), F(32, 9)),
    (F(19372, 6561), F(-25360, 2187), F(64448, 6561), F(-212, 729)),
    (F(9017, 3168), F(-355, 33), F(46732, 5247), F(49, 176), F(-5103, 18656)),
    (F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84)),
)

# fifth-order weights (equal to the last row of A: first same as last)
B_EXACT = (F(35, 384), F(0), F(500, 1113), F(125, 192), F(-2187, 6784), F(11, 84), F(0))
# embedded fourth-order weights
B4_EXACT = (
    F(5179, 57600), F(0), F(7571, 16695), F(393, 640),
    F(-92097, 339200), F(187, 2100), F(1, 40),
)
E_EXACT = tuple(b - b4 for b, b4 in zip(B_EXACT, B4_EXACT))

# y(t0 + th h) = y0 + h sum_j K_j sum_m P[j][m] th^(m+1)
P_EXACT = (
    (F(1), F(-8048581381, 2820520608), F(8663915743, 2820520608), F(-12715105075, 11282082432)),
    (F(0), F(0), F(0), F(0)),
    (F(0), F(131558114200, 32700410799), F(-68118460800, 10900136933), F(87487479700, 32700410799)),
    (F(0), F(-1754552775, 470086768), F(14199869525, 1410260304), F(-10690763975, 1880347072)),
    (F(0), F(127303824393, 49829197408), F(-318862633887, 49829197408), F(701980252875, 199316789632)),
    (F(0), F(-282668133, 205662961), F(2019193451, 616988883), F(-1453857185, 822651844)),
    (F(0), F(40617522, 29380423), F(-110615467, 29380423), F(69997945, 29380423)),
)

C = tuple(float(x) for x in C_EXACT)
A = tuple(tuple(float(x) for x in row) for row in A_EXACT)
B = tuple(float(x) for x in B_EXACT)
E = tuple(float(x) for x in E_EXACT)
P = tuple(tuple(float(x) for x in row) for row in P_EXACT)

STAGES = 7
ORDER = 5
ERROR_ORDER = 4
DENSE_ORDER = 4
