"""Build a scoring rule from a decision problem and audit its propriety.

Any loss table over (states, actions) induces a score: report a forecast,
act optimally against it, pay the realized loss.  Scores built this way are
automatically proper.  Hand-rolled rules are not, and the audit catches it.
"""

import numpy as np

from preqscore import DecisionProblem, check_propriety, score_from_decision_problem, stream


def main():
    states = ["dry", "drizzle", "storm"]
    actions = ["no gear", "umbrella", "stay home"]
    loss = np.array([
        [0.0, 1.0, 5.0],  # dry
        [4.0, 1.0, 5.0],  # drizzle
        [9.0, 6.0, 5.0],  # storm
    ])
    problem = DecisionProblem(states, actions, loss)

    def induced(x, q):
        return score_from_decision_problem(problem, q, x).value

    forecast = [0.2, 0.5, 0.3]
    print("best action under forecast", forecast, "->",
          actions[problem.best_action_index(forecast)])
    for realized in states:
        print(f"  realized {realized:>8}: score {induced(realized, forecast):.2f}")

    # Audit over a grid of forecasts: truthful reporting must minimize the
    # expected score, whatever the true distribution is.
    grid = [
        [1.0, 0.0, 0.0],
        [0.0, 1.0, 0.0],
        [0.0, 0.0, 1.0],
        [0.5, 0.5, 0.0],
        [0.2, 0.5, 0.3],
        [0.1, 0.1, 0.8],
        [1 / 3, 1 / 3, 1 / 3],
    ]
    report = check_propriety(induced, grid, states=states)
    print(f"\ndecision-induced rule proper on the grid: {report.is_proper}")

    # A tempting but broken rule: reward the probability put on the outcome,
    # linearly.  Lying toward the mode beats honesty.
    def linear_score(x, q):
        return -q[states.index(x)]

    report = check_propriety(linear_score, grid, states=states)
    print(f"linear rule proper: {report.is_proper} "
          f"({len(report.violations)} violations)")
    worst = max(report.violations, key=lambda v: v.gap)
    print(f"  worst case: truth {grid[worst.p_index]}, report {grid[worst.q_index]},"
          f" expected gain {worst.gap:.3f}")

    # Even random loss tables induce proper rules.
    rng = stream(seed=2)
    ok = True
    for _ in range(10):
        table = rng.uniform(0.0, 1.0, size=(3, 4))
        dp = DecisionProblem(states, list("abcd"), table)
        rule = lambda x, q, dp=dp: score_from_decision_problem(dp, q, x).value
        ok = ok and check_propriety(rule, grid, states=states).is_proper
    print(f"\n10 random loss tables, all induced rules proper: {ok}")


if __name__ == "__main__":
    main()
