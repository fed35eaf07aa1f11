"""Walk through the splitting bigons, decomposition and repacking count of a few necklaces."""
from flatpack.builders import make_necklace
from flatpack.topomap import decompose, enumerate_repackings, order_splitting_bigons


def show(title, n):
    m = n.map
    order = order_splitting_bigons(m, n.red_vertex)
    dec = decompose(m, n.red_vertex)
    cands, bound = enumerate_repackings(m, n.marked, n.genus, n.red_vertex)
    print(f"{title}: genus {n.genus}, V={m.V} E={m.E} F={m.F}")
    print(f"  splitting bigons in order: {[(o.bigon.v1, o.bigon.v2, o.x, o.y) for o in order]}")
    print(f"  piece genera: {dec.genus_pattern}")
    print(f"  distinct repackings besides the original: {len(cands)} (bound {bound})")


def main():
    show("symmetric, one bigon", make_necklace([1], symmetric=True))
    show("asymmetric, three bigons", make_necklace([3], seed=1))
    show("genus three, groups of 2 and 1", make_necklace([2, 1], seed=2))


if __name__ == "__main__":
    main()
