"""Write the three MONK's problems over the full 432-instance attribute space.

The full space is what the original `monks-N.test` files contain; labels are
produced from the published target concepts (no class noise).
"""
import itertools

DOMAINS = [(1, 2, 3), (1, 2, 3), (1, 2), (1, 2, 3), (1, 2, 3, 4), (1, 2)]
TARGETS = {
    "monks1": lambda a: a[0] == a[1] or a[4] == 1,
    "monks2": lambda a: sum(v == 1 for v in a) == 2,
    "monks3": lambda a: (a[4] == 3 and a[3] == 1) or (a[4] != 4 and a[1] != 3),
}

for name, target in TARGETS.items():
    with open(f"{name}.csv", "w") as out:
        out.write("a1,a2,a3,a4,a5,a6,class\n")
        for a in itertools.product(*DOMAINS):
            out.write(",".join(map(str, a)) + f",{int(target(a))}\n")
    with open(f"{name}.schema", "w") as out:
        out.write(f"# {name}: attribute values are ordered integers\n")
        for i, dom in enumerate(DOMAINS, 1):
            out.write(f"a{i}: ordered {{{','.join(map(str, dom))}}}\n")
        out.write("class: class {0,1}\n")
