"""Reference data the tool checks itself against."""

COMPONENT_COUNTS = {"A1": 1, "A2": 1, "A3": 2, "A4": 5, "B2": 2}

DIM_B = {"A1": 2, "A2": 5, "A3": 9, "A4": 14, "B2": 6}

DEFAULT_PRIMES = {"A1": (2, 3, 5), "A2": (2, 3, 5), "A3": (2, 3, 5), "A4": (2, 3), "B2": (3, 5)}

# named representatives, as sums of basis labels
PINNED = {
    "A1": {"e1": "E12"},
    "A2": {"e1": "E12+E23", "e2": "E12", "e3": "E23"},
    "A3": {
        "e1": "E12+E23+E34",
        "e2": "E12+E23",
        "e3": "E12+E34+E24",
        "e8": "E23+E24+E14",
    },
    "A4": {
        "e1": "E12+E23+E34+E45",
        "e2": "E12+E23+E34",
        "e3": "E12+E23+E45+E24",
        "e4": "E12+E23+E45",
        "e5": "E12+E23+E35",
        "e6": "E12+E23",
        "e7": "E12+E34+E45+E24",
        "e9": "E12+E34+E24+E25",
        "e10": "E12+E34+E24",
        "e11": "E12+E34+E25",
        "e12": "E12+E34",
        "e13": "E12+E45+E24",
        "e14": "E12+E45+E25",
        "e15": "E12+E45",
        "e16": "E12+E24+E35",
        "e17": "E12+E24",
        "e18": "E12+E35+E25",
        "e19": "E12+E35",
        "e20": "E12+E25",
        "e21": "E12",
        "e23": "E23+E34+E15",
        "e24": "E23+E34",
        "e25": "E23+E45+E24+E14",
        "e29": "E23+E35+E14",
        "e30": "E23+E35",
        "e31": "E23+E14",
        "e32": "E23+E15",
        "e33": "E23",
        "e47": "E13+E24+E35",
        "e48": "E13+E24",
    },
    "B2": {
        "xa+xb": "xa+xb",
        "xa+xa2b": "xa+xa2b",
        "xa": "xa",
        "xb": "xb",
    },
}

# expected components: regular element first, then the diagram-paired classes
COMPONENT_REPS = {
    "A1": ("e1",),
    "A2": ("e1",),
    "A3": ("e1", "e3"),
    "A4": ("e1", "e3", "e7", "e9", "e25"),
    "B2": ("xa+xb", "xa+xa2b"),
}

# msupp of the A4 component classes, as simple-root index sets
A4_COMPONENT_MSUPP = {
    "e1": {"a1", "a2", "a3", "a4"},
    "e3": {"a1", "a2", "a4"},
    "e7": {"a1", "a3", "a4"},
    "e9": {"a1", "a3"},
    "e25": {"a2", "a4"},
}

# Witt algebra W(1): dim C_2 and component counts for W(1), W(1)_0, W(1)_1
WITT_C2_DIM = {"witt": lambda p: p + 1, "witt-b": lambda p: p, "witt-u": lambda p: p}
WITT_MODALITY = {"witt": 1, "witt-b": 1, "witt-u": 2}
WITT_COMPONENTS = {"witt": lambda p: (p - 1) // 2, "witt-b": lambda p: (p - 1) // 2, "witt-u": lambda p: (p - 3) // 2}
