"""In-mission training: diagnose a single mission with no pre-trained model.

Windows stream through a bounded queue. The live prefix is assumed healthy and
buffered as training rows; once enough of the mission has passed, a classifier
is trained in the loop (against a generated contrast corpus) and diagnosis
switches from rules-only to the full two-tier path. If training ever diverges,
the mission degrades gracefully to a conservative escalation rule instead of
dying mid-flight.
"""

from tierkb.pipeline import run_online


def show(report):
    mode = "degraded (rules only)" if report.fallback else "trained in loop"
    print(f"scenario {report.scenario}: verdict={report.final_verdict} "
          f"({report.final_condition}), {mode}")
    print(f"  train rows buffered {report.train_rows}, contrast rows {report.contrast_rows}, "
          f"windows dropped {report.dropped_windows}")
    if report.fallback:
        print(f"  fallback reason: {report.fallback_reason}")
    print("  idx   span         condition                verdict")
    for w in report.windows:
        print(f"  {w.index:>3}   {w.t_start:4.1f}-{w.t_end:4.1f}s   "
              f"{w.condition:<24} {w.verdict}")


def main():
    print("--- healthy mission, ample queue ---")
    show(run_online(kind="baseline", seed=0))

    print("\n--- blocked-path fault appearing after the training prefix ---")
    show(run_online(kind="unseenObstacle", seed=0))

    print("\n--- same fault through a tiny queue: early windows get dropped ---")
    show(run_online(kind="unseenObstacle", seed=0, queue_capacity=2))


if __name__ == "__main__":
    main()
