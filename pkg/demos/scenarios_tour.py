"""The three bramble constructions on small gadgets.

Run with ``python demos/scenarios_tour.py``.
"""
from dibramble import bridge_gadget, dense_scenario, sparse_scenario, sparse_wrapped, verify_bramble
from dibramble.acceptance import bridge_choice
from dibramble.generators import hub_walks


def show(label, G, B):
    ok = verify_bramble(G, B).ok
    print(f"{label:34} size {B.size}, congestion {B.congestion}, verified {ok}")


def main():
    G, F = hub_walks(5)
    show("dense, 6 walks through a hub", G, dense_scenario(G, F, 5, 4))

    a, b = 5, 10
    G, ps, forward = bridge_gadget(a, b, shift=1)
    P = bridge_choice(a, b, forward, symmetric=False)
    info = {}
    B = sparse_scenario(G, ps, list(P), P, alpha=1, info=info)
    show(f"sparse, a={a}, disjoint bridges", G, B)
    print(f"  pair graph edges {info['pair_graph_edges']}, clique minor {info['minor_size']}, q {info['q']}")

    G, ps, forward = bridge_gadget(4, 8, shift=1)
    info = {}
    B = sparse_wrapped(G, ps, list(forward), forward, d=1, info=info)
    show("wrapped, whole bridge linkages", G, B)
    print(f"  smallest linkage {info['min_linkage_size']}, size hypothesis met: {info['size_hypothesis']}")


if __name__ == "__main__":
    main()
