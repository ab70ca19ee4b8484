"""Class groups of imaginary quadratic fields from reduced binary quadratic forms.

Prints the reduced forms of discriminant -23, the group table, its characters,
and compares h(D) with the analytic class number formula on a range of D.
"""
from torusrtf.qfield import analytic_class_number, characters, class_group, make_field

G = class_group(make_field(-23))
print("reduced forms of discriminant -23:", G.elements)
print("structure:", G.structure)
for f in G.elements:
    print(f, "->", [G.mul(f, g) for g in G.elements])

print("\ncharacter values on the classes:")
for chi in characters(G):
    print(chi.exps, "order", chi.order, [complex(round(chi(f).real, 6), round(chi(f).imag, 6)) for f in G.elements])

print("\nD, h from forms, analytic value")
for D in (-3, -4, -47, -71, -104, -163, -1999):
    print(D, class_group(make_field(D)).h, round(analytic_class_number(D), 4))
