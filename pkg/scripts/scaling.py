"""Time CoreT over an alpha grid and report per-tick update work.

Usage: python scripts/scaling.py --input data/CollegeMsg.txt --k 2 5
"""
import argparse
import statistics
import time

from coret.query import run_query
from coret.temporal_graph import QueryInterval, read_edge_list


def main():
    p = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    p.add_argument("--input", required=True)
    p.add_argument("--k", type=int, nargs="+", default=[2, 5])
    p.add_argument("--alpha", type=float, nargs="+", default=[0.2, 0.4, 0.6, 0.8, 1.0])
    p.add_argument("--reps", type=int, default=3)
    a = p.parse_args()
    g = read_edge_list(a.input)
    print(f"# |V|={g.n} |E|={g.num_temporal_edges} t_max={g.t_max}")
    print("k,alpha,ms,init_ms,update_ms,list_ms,cores,max_extractions,mean_extractions,bound")
    for k in a.k:
        for alpha in a.alpha:
            q = QueryInterval(0, int(alpha * g.t_max), k)
            runs = []
            for _ in range(a.reps):
                t0 = time.perf_counter()
                s = run_query(g, q)
                runs.append(((time.perf_counter() - t0) * 1e3, s))
            ms, s = min(runs, key=lambda r: r[0])
            mean = statistics.fmean(s.extractions_per_tick) if s.extractions_per_tick else 0.0
            print(f"{k},{alpha},{ms:.1f},{s.init_ms:.1f},{s.update_ms:.1f},{s.list_ms:.1f},"
                  f"{s.cores_emitted},{s.max_extractions},{mean:.2f},{s.window_vertices + s.window_edges}")


if __name__ == "__main__":
    main()
