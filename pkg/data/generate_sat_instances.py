import argparse
import csv
import os
from typing import Dict, List

from src.load.load import write_dimacs
from src.sat.instance import planted_1in3_instance, random_1in3_instance, satisfiable_by_enumeration

# Enumeration decides satisfiability for the index file; keep instances small.
MAX_ENUMERATED_VARS: int = 20


def generate_instances(out_dir: str, count: int = 50, n_vars: int = 6, n_clauses: int = 6,
                       planted_rate: float = 0.5, seed: int = 0) -> List[Dict[str, str]]:
    """
    Writes a batch of 1-in-3-SAT instances and an ``index.csv`` describing them.

    Roughly ``planted_rate`` of the instances are built around a hidden
    satisfying assignment; the rest are uniformly random and may be unsatisfiable.

    Args:
        out_dir (str): Directory for the ``.cnf`` files and the index.
        count (int): Number of instances.
        n_vars (int): Variables per instance.
        n_clauses (int): Clauses per instance.
        planted_rate (float): Fraction of planted (satisfiable) instances.
        seed (int): Base seed; instance i uses ``seed + i``.
    """
    os.makedirs(out_dir, exist_ok=True)
    planted_count = int(round(count * planted_rate))
    rows: List[Dict[str, str]] = []
    for i in range(count):
        if i < planted_count:
            inst, _ = planted_1in3_instance(n_vars, n_clauses, seed + i)
            kind = "planted"
        else:
            inst = random_1in3_instance(n_vars, n_clauses, seed + i)
            kind = "random"
        filename = f"instance_{i:04d}.cnf"
        write_dimacs(inst, os.path.join(out_dir, filename), comment=f"{kind} 1-in-3-SAT, seed {seed + i}")
        satisfiable = ""
        if n_vars <= MAX_ENUMERATED_VARS:
            satisfiable = str(satisfiable_by_enumeration(inst) is not None)
        rows.append({"file": filename, "kind": kind, "n_vars": str(n_vars), "n_clauses": str(n_clauses),
                     "satisfiable": satisfiable})

    with open(os.path.join(out_dir, "index.csv"), "w", newline="", encoding="utf-8") as csvfile:
        writer = csv.DictWriter(csvfile, fieldnames=list(rows[0].keys()) if rows else ["file"], quoting=csv.QUOTE_MINIMAL)
        writer.writeheader()
        writer.writerows(rows)

    print(f"Generated {count} instances in {out_dir}")
    return rows


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Write random 1-in-3-SAT instances.")
    parser.add_argument("--out", default="data/sat")
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--vars", type=int, default=6)
    parser.add_argument("--clauses", type=int, default=6)
    parser.add_argument("--planted-rate", type=float, default=0.5)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()
    generate_instances(args.out, args.count, args.vars, args.clauses, args.planted_rate, args.seed)
