"""Extract a bramble from a path system on a bidirected grid and audit it.

Run with ``python demos/grid_to_bramble.py``.
"""
from dibramble import (bramble_order, gen_grid_path_system, params_for_system, run_pipeline,
                       validate_path_system, verify_bramble)


def main():
    G, ps = gen_grid_path_system(8, 4, 4)
    print(f"grid: {G.n} vertices, {G.m} arcs; path system with a={ps.a}, b={ps.b}")
    print("path system valid:", validate_path_system(G, ps).ok)

    # desk-scale parameters: the full schedule would ask for astronomically large b
    params = params_for_system(ps, k=2, sigma=0.25, d1=4, d2=4, d3=1, bowtie_factor=2)
    for note in params.notes:
        print("note:", note)

    result = run_pipeline(G, ps, params)
    rep = result.report
    print(f"pairs: {rep['size_V']}, closed-walk pairs: {rep['size_Z']}, "
          f"matchings: {rep['size_M1']} / {rep['size_M2']}")
    print(f"case {rep['case']}: size {rep['bramble_size']}, congestion {rep['congestion']}")

    B = result.bramble
    print("verifier report clean:", verify_bramble(G, B).ok)
    print("order:", bramble_order(G, B))
    for i, S in enumerate(B.elements):
        print(f"  element {i}: {len(S)} vertices")


if __name__ == "__main__":
    main()
