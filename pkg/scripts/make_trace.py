"""Write the synthetic message trace as a ``u v t`` edge list."""
import argparse

from coret.synth import message_trace


def main():
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("--out", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n", type=int, default=1862)
    p.add_argument("--messages", type=int, default=59835)
    p.add_argument("--ticks", type=int, default=58911)
    a = p.parse_args()
    rows = message_trace(a.seed, n=a.n, messages=a.messages, ticks=a.ticks)
    with open(a.out, "w", encoding="utf-8") as fh:
        fh.writelines(f"{u} {v} {t}\n" for u, v, t in rows)


if __name__ == "__main__":
    main()
