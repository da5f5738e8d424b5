"""Walk through the 16-ASK alphabet, its labellings and the two-way split.

Shows the Gray and natural label tables, the reference sub-constellation,
and how the selector bit b1 moves a symbol to its +2 neighbour while the
full Gray label stays consistent.
"""

import numpy as np

from pasbicm.constellation import GRAY, NATURAL, AskConstellation, Labelling, SubConstellation

c = AskConstellation(4)
print(f"16-ASK alphabet ({c.size} symbols): {c.symbols.tolist()}")
print(f"average energy (uniform): {c.average_energy():.1f}\n")

for kind in (GRAY, NATURAL):
    lab = Labelling(c, kind)
    print(f"{kind} labelling (rows b1..b4):")
    header = " ".join(f"{s:>3d}" for s in c.symbols)
    print(f"      {header}")
    for j in range(4):
        row = " ".join(f"{b:>3d}" for b in lab.table[:, j])
        print(f"  b{j + 1}: {row}")
    print()

sub = SubConstellation(c)
print(f"reference sub-constellation: {sub.members.tolist()}")
print(f"shifted copy:                {(sub.members + 2).tolist()}\n")

print("selector rule: keep the mapped symbol when b1 xor b2 xor b3 xor b4 = 0,")
print("otherwise transmit its +2 neighbour; either way the Gray label of the")
print("transmitted symbol is exactly (b1, b2, b3, b4):\n")
gray = Labelling(c, GRAY)
rng = np.random.default_rng(1)
for _ in range(6):
    bits = rng.integers(0, 2, size=4)
    x = sub.map_reduced(bits[1:])
    sent = sub.apply_shift(x, bits[0], bits[1:])
    label = gray.bits_of(sent)
    print(f"  bits {bits.tolist()} -> mapped {int(x):+3d} -> sent {int(sent):+3d}"
          f"   label check {label.tolist()}")
