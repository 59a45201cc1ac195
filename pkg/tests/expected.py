"""Frozen expected values, each derived by hand from the definitions.

Point sets are tuples over the variable order given; free-algebra elements
are named by their value vectors in lexicographic point order.
"""

# free algebra sizes |Free(Var(H), X)|
FREE_SIZES = {
    ("Z2", 1): 2,  # {0, x}
    ("Z2", 2): 4,  # {0, x, y, x+y}
    ("Z4", 1): 4,  # {0, x, 2x, 3x}
    ("Z4", 2): 16,  # {ax + by}
    ("Klein", 1): 2,  # exponent 2: {0, x}
    ("Klein", 2): 4,
    ("LZ2", 1): 1,  # x*x = x
    ("LZ2", 2): 2,  # x*y = x
    ("F4", 1): 256,  # primal: every function F4 -> F4 is a polynomial
    ("1", 1): 1,
}

# closed point sets for |X| = 1, as sets of elements
LATTICE_1 = {
    "Z2": [{0}, {0, 1}],
    "Z4": [{0}, {0, 2}, {0, 1, 2, 3}],
    "1": [{0}],
    "LZ2": [{0, 1}],  # no constants and x*x = x: only the full line is closed
}

HEIGHT_1 = {"Z2": 1, "Z4": 2, "1": 0}
MAX_CHAIN_1 = {"Z2": 2, "Z4": 3, "1": 1}

# homs as maps (tuple of images)
HOMS = {
    ("Z2", "Z4"): [(0, 0), (0, 2)],
    ("Z4", "Z2"): [(0, 0, 0, 0), (0, 1, 0, 1)],
}

# geometric equivalence classes in the six-algebra pool
EQUIV_CLASSES = [{"1"}, {"Z2", "Klein", "K2"}, {"Z3"}, {"Z4"}]

# number of congruences of Free(Z4; x) (= subgroups of Z4) and Free(Z2; x,y)
CONGRUENCE_COUNTS = {("Z2", 1): 2, ("Z4", 1): 3, ("Z2", 2): 5}

# category slice sizes: (objects, skeleton classes)
SLICE = {("Z2", 1): (2, 2), ("Z4", 1): (3, 3)}
