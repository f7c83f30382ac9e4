/** Dashboard: cluster count, attribute count, information content.
 *
 * Information content is shown instead of the interestingness score because
 * it stays comparable when the hyperparameters change. After a parameter
 * change each card also shows the delta against the previous solution.
 */

import { SolutionSummary } from "./types.js";

export interface MetricCard {
  label: string;
  value: string;
  delta: string | null;
}

function deltaText(current: number, previous: number | null, digits = 0): string | null {
  if (previous === null) {
    return null;
  }
  const diff = current - previous;
  if (diff === 0) {
    return "±0";
  }
  const text = Math.abs(diff).toFixed(digits);
  return diff > 0 ? `+${text}` : `-${text}`;
}

export function buildDashboard(
  summary: SolutionSummary,
  previous: SolutionSummary | null,
): MetricCard[] {
  return [
    {
      label: "# clusters",
      value: String(summary.k),
      delta: deltaText(summary.k, previous ? previous.k : null),
    },
    {
      label: "# attributes",
      value: String(summary.n_attributes),
      delta: deltaText(summary.n_attributes, previous ? previous.n_attributes : null),
    },
    {
      label: "Information content",
      value: `${summary.information.toFixed(1)} bits`,
      delta: deltaText(summary.information, previous ? previous.information : null, 1),
    },
  ];
}

export function dashboardHtml(cards: MetricCard[]): string {
  return cards
    .map((card) => {
      const delta = card.delta === null ? "" : `<span class="delta">(${card.delta})</span>`;
      return (
        `<div class="card"><div class="card-label">${card.label}</div>` +
        `<div class="card-value">${card.value} ${delta}</div></div>`
      );
    })
    .join("");
}
