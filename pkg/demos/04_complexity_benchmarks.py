"""How the knowledge base scales: stored bytes and reasoning time.

The sample table is cloned at growing multiples, populated into the ontology,
and measured two ways: serialized document size against raw tabular size
(should be a straight line), and full saturation wall time against scale
(should grow near-linearly — a log-log slope close to 1).
"""

from tierkb.pipeline import bench_space, bench_time, growth_exponent


def main():
    print("--- stored size vs scale ---")
    space = bench_space((1, 2, 4, 8))
    print(space.to_csv(), end="")
    fit = space.fit()
    ratios = [row.ratio for row in space.rows]
    print(f"linear fit: kb_bytes = {fit.slope:.1f} * scale + {fit.intercept:.1f}, "
          f"R^2 = {fit.r_squared:.6f}")
    print(f"document/raw overhead ratio: {min(ratios):.2f}-{max(ratios):.2f} "
          f"(published comparison point: 24.5x)")

    print("\n--- reasoning time vs scale ---")
    timing = bench_time((1, 2, 4, 8, 16))
    print(timing.to_csv(), end="")
    print(f"log-log growth exponent: {growth_exponent(timing):.3f} "
          f"(1.0 would be exactly linear)")


if __name__ == "__main__":
    main()
