"""Shared case tables for the model tests and the acceptance suite."""

# (table, key, new value, expected clause of the first failure)
S4_MUTATIONS = [
    ("neg", "t", "t", "ii"), ("neg", "f", "f", "ii"), ("neg", "nec", "nec", "ii"),
    ("neg", "imp", "f", "ii"),
    ("istrue", "t", "f", "iii"), ("istrue", "f", "t", "iii"), ("istrue", "nec", "imp", "iii"),
    ("istrue", "imp", "nec", "iii"),
    ("isfalse", "t", "t", "iv"), ("isfalse", "f", "f", "iv"), ("isfalse", "nec", "nec", "iv"),
    ("box", "t", "t", "ix"), ("box", "f", "nec", "ix"), ("box", "nec", "f", "ix"),
    ("impl", ("t", "f"), "t", "i"), ("impl", ("f", "f"), "f", "i"),
    ("impl", ("nec", "imp"), "t", "i"), ("impl", ("imp", "imp"), "f", "i"),
    ("mem", ("nec", "l"), "f", "x"), ("mem", ("t", "l"), "t", "x"),
    ("designated", "eq", ("f", "f"), "v"),
]

EXTENSIONAL_MUTATIONS = [
    ("neg", "t", "t", "ii"), ("neg", "f", "f", "ii"),
    ("istrue", "t", "f", "iii"), ("istrue", "f", "t", "iii"),
    ("isfalse", "t", "t", "iv"), ("isfalse", "f", "f", "iv"),
    ("box", "t", "f", "ix"), ("box", "f", "t", "ix"),
    ("impl", ("t", "t"), "f", "i"), ("impl", ("t", "f"), "t", "i"),
    ("impl", ("f", "t"), "f", "i"), ("impl", ("f", "f"), "f", "i"),
    ("mem", ("t", "l"), "f", "x"), ("mem", ("f", "l"), "t", "x"),
    ("designated", "eq", ("f", "f"), "v"), ("designated", "ref", ("t", "t"), "vi"),
    ("designated", "teq", ("f", "t"), "vii"), ("designated", "le", ("t", "t"), "viii"),
    ("designated", "jquant", ("f", "f"), "xiii"), ("designated", "quant", ("t", "t"), "xiv"),
]
