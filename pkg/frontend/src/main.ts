/** Page bootstrap: binds the controller to the DOM.
 *
 * The session id comes from the ?session= query parameter (or the input
 * box). Everything below the bindings is plain rendering of descriptor
 * objects produced by the pure modules.
 */

import { HttpApi } from "./api.js";
import { AppController, ViewSink } from "./controller.js";
import { dashboardHtml, MetricCard } from "./dashboard.js";
import { ExplanationPanel } from "./charts.js";
import { renderSvg, SvgNode } from "./svg.js";
import { SliderValues } from "./state.js";

const byId = <T extends HTMLElement>(id: string) => document.getElementById(id) as T;

function panelHtml(panel: ExplanationPanel): string {
  const charts = panel.charts
    .map(
      (chart) =>
        `<figure><figcaption>${chart.title}</figcaption>${renderSvg(chart.svg)}</figure>`,
    )
    .join("");
  return `<h3>${panel.header}</h3><div class="charts">${charts}</div>`;
}

class DomView implements ViewSink {
  showScatter(svg: SvgNode): void {
    byId("scatter").innerHTML = renderSvg(svg);
  }

  showDashboard(cards: MetricCard[]): void {
    byId("dashboard").innerHTML = dashboardHtml(cards);
  }

  showExplanations(panels: ExplanationPanel[], selected: number): void {
    const picker = byId<HTMLSelectElement>("cluster-picker");
    picker.innerHTML = panels
      .map((_, i) => `<option value="${i}" ${i === selected ? "selected" : ""}>Cluster ${i}</option>`)
      .join("");
    const panel = panels[Math.min(selected, panels.length - 1)];
    byId("explanation").innerHTML = panel ? panelHtml(panel) : "";
  }

  showNotice(text: string): void {
    byId("notice").textContent = text;
  }

  showProgress(text: string): void {
    byId("progress").textContent = text;
  }

  setActions(allowed: { recalc: boolean; refine: boolean }): void {
    byId<HTMLButtonElement>("recalc").disabled = !allowed.recalc;
    byId<HTMLButtonElement>("refine").disabled = !allowed.refine;
  }

  syncSliders(sliders: SliderValues): void {
    byId<HTMLInputElement>("alpha").value = String(sliders.alpha);
    byId("alpha-value").textContent = String(sliders.alpha);
    byId<HTMLInputElement>("beta").value = String(sliders.beta);
    byId("beta-value").textContent = sliders.beta.toFixed(2);
    byId<HTMLInputElement>("time-limit").value = String(sliders.timeLimitMs);
    byId("time-value").textContent = `${(sliders.timeLimitMs / 1000).toFixed(1)} s`;
  }
}

function start(): void {
  const params = new URLSearchParams(window.location.search);
  const sessionId = params.get("session") ?? "demo";
  byId<HTMLInputElement>("session-id").value = sessionId;
  const controller = new AppController(new HttpApi(""), new DomView(), sessionId);

  byId("recalc").addEventListener("click", () => void controller.recalc());
  byId("refine").addEventListener("click", () => void controller.refine());
  byId("alpha").addEventListener("input", (event) =>
    controller.setSliders({ alpha: Number((event.target as HTMLInputElement).value) }),
  );
  byId("beta").addEventListener("input", (event) =>
    controller.setSliders({ beta: Number((event.target as HTMLInputElement).value) }),
  );
  byId("time-limit").addEventListener("input", (event) =>
    controller.setSliders({ timeLimitMs: Number((event.target as HTMLInputElement).value) }),
  );
  byId("cluster-picker").addEventListener("change", (event) =>
    controller.selectCluster(Number((event.target as HTMLSelectElement).value)),
  );
  byId("session-id").addEventListener("change", () => {
    const next = byId<HTMLInputElement>("session-id").value.trim();
    if (next) {
      const url = new URL(window.location.href);
      url.searchParams.set("session", next);
      window.location.href = url.toString();
    }
  });

  void controller.initialLoad().catch((error) => {
    byId("notice").textContent = String(error);
  });
}

document.addEventListener("DOMContentLoaded", start);
