"""Measured congestion of bowtie walks against the bound for each untangledness pattern.

Run with ``python demos/bowtie_table.py``.
"""
from dibramble import bowtie, congestion, congestion_bound
from dibramble.acceptance import bowtie_cases
from dibramble.generators import bidirected_grid

N = 12


def main():
    G = bidirected_grid(N)
    print(f"{'linkages':40} {'alpha':>5} {'beta':>5} {'d':>2} {'measured':>8} {'bound':>5}")
    for name, tl1, tl2 in bowtie_cases(N):
        for d in (1, 2):
            # factor 1 keeps the density hypothesis within reach of a 12 x 12 grid
            fam = bowtie(tl1, tl2, d, factor=1, G=G)
            print(f"{name:40} {tl1.overlap:>5} {tl2.overlap:>5} {d:>2} "
                  f"{congestion(fam.walks):>8} {congestion_bound(tl1, tl2):>5}")


if __name__ == "__main__":
    main()
