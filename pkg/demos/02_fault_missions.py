"""Fault-injection sweep: diagnose seven simulated robot missions.

A classifier is trained once on held-out training missions, then each scenario
kind — two healthy baselines and five injected faults — is replayed as a fresh
mission. Telemetry is windowed, each window gets a condition from the neural
tier, and the symbolic tier turns condition runs plus rule-detected symptoms
into a mission verdict that only ever escalates.
"""

from tierkb.dataset import SCENARIO_KINDS
from tierkb.pipeline import EXPECTED_VERDICTS, run_experiment2


def main():
    print("running the sweep (training once, then one mission per scenario)...")
    report = run_experiment2()
    print(f"trained on {report.train_rows} rows; "
          f"train {report.timing['train_s']:.1f} s, total {report.timing['total_s']:.1f} s")

    print("\nscenario            verdict               condition                expected")
    for kind in SCENARIO_KINDS:
        mission = report.mission_for(kind)
        mark = "ok" if mission.final_verdict == EXPECTED_VERDICTS[kind] else "MISS"
        print(f"{kind:<18} {mission.final_verdict:<21} {mission.final_condition:<24} "
              f"{EXPECTED_VERDICTS[kind]:<18} {mark}")

    mission = report.mission_for("flatTyre")
    print(f"\n--- window-by-window view of the {mission.scenario} mission ---")
    print("idx   span         condition                run  verdict              symptoms")
    for w in mission.windows:
        print(f"{w.index:>3}   {w.t_start:4.1f}-{w.t_end:4.1f}s   {w.condition:<24} "
              f"{w.run_length:>3}  {w.verdict:<20} {', '.join(w.symptoms) or '-'}")

    decisive = next(w for w in mission.windows if w.verdict == mission.final_verdict)
    print(f"\nevidence for the first {mission.final_verdict} window ({decisive.individual}):")
    for line in decisive.evidence:
        print(" ", line)
    if not decisive.evidence:
        print("  (no rule fired; the verdict came from the condition run alone)")


if __name__ == "__main__":
    main()
