/** Wires slider and button actions to the API and keeps the views fresh.
 *
 * One mutation is in flight at a time; while a long search runs the
 * controller polls the status endpoint and then refetches everything, so
 * every number on screen comes verbatim from the server.
 */

import { buildDashboard, MetricCard } from "./dashboard.js";
import { buildExplanationPanel, ExplanationPanel } from "./charts.js";
import { buildScatter } from "./scatter.js";
import { ColorAssigner } from "./palette.js";
import { SvgNode } from "./svg.js";
import {
  acceptSummary,
  allowedActions,
  clampSliders,
  initialState,
  SliderValues,
  ViewState,
} from "./state.js";
import { Api, ApiError } from "./types.js";

export interface ViewSink {
  showScatter(svg: SvgNode): void;
  showDashboard(cards: MetricCard[]): void;
  showExplanations(panels: ExplanationPanel[], selected: number): void;
  showNotice(text: string): void;
  showProgress(text: string): void;
  setActions(allowed: { recalc: boolean; refine: boolean }): void;
  syncSliders(sliders: SliderValues): void;
}

export interface ControllerOptions {
  pollIntervalMs?: number;
  sleep?: (ms: number) => Promise<void>;
}

const defaultSleep = (ms: number) => new Promise<void>((resolve) => setTimeout(resolve, ms));

export class AppController {
  state: ViewState;
  private colors = new ColorAssigner();
  private panels: ExplanationPanel[] = [];
  private pollIntervalMs: number;
  private sleep: (ms: number) => Promise<void>;

  constructor(
    private api: Api,
    private view: ViewSink,
    sessionId: string,
    options: ControllerOptions = {},
  ) {
    this.state = initialState(sessionId);
    this.pollIntervalMs = options.pollIntervalMs ?? 500;
    this.sleep = options.sleep ?? defaultSleep;
  }

  setSliders(values: Partial<SliderValues>): void {
    this.state = {
      ...this.state,
      sliders: clampSliders({ ...this.state.sliders, ...values }),
    };
    this.view.syncSliders(this.state.sliders);
  }

  selectCluster(index: number): void {
    this.state = { ...this.state, selectedCluster: index };
    if (this.panels.length) {
      this.view.showExplanations(this.panels, this.state.selectedCluster);
    }
  }

  recalc(): Promise<void> {
    return this.runSearch("recalc");
  }

  refine(): Promise<void> {
    return this.runSearch("refine");
  }

  /** Fetch current server state; renders the empty scatter before the first search. */
  async initialLoad(): Promise<void> {
    this.view.syncSliders(this.state.sliders);
    this.view.setActions(allowedActions(this.state));
    try {
      await this.refreshAll();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        const embedding = await this.api.embedding(this.state.sessionId);
        this.view.showScatter(buildScatter(embedding, this.colors));
        this.view.showNotice("no clustering yet; press recalc");
        return;
      }
      throw error;
    }
  }

  private async runSearch(action: "recalc" | "refine"): Promise<void> {
    if (!allowedActions(this.state)[action]) {
      return;
    }
    this.state = { ...this.state, pending: true, notice: "" };
    this.view.setActions(allowedActions(this.state));
    this.view.showNotice("");
    try {
      const { alpha, beta, timeLimitMs } = this.state.sliders;
      const params = { alpha, beta, time_budget_ms: timeLimitMs };
      const result =
        action === "recalc"
          ? await this.api.recalc(this.state.sessionId, params)
          : await this.api.refine(this.state.sessionId, params);
      if (result.accepted) {
        await this.pollUntilDone();
      }
      await this.refreshAll();
    } catch (error) {
      if (error instanceof ApiError && error.status === 409) {
        this.view.showNotice(error.message);
      } else {
        throw error;
      }
    } finally {
      this.state = { ...this.state, pending: false };
      this.view.setActions(allowedActions(this.state));
      this.view.showProgress("");
    }
  }

  private async pollUntilDone(): Promise<void> {
    for (;;) {
      await this.sleep(this.pollIntervalMs);
      const status = await this.api.status(this.state.sessionId);
      this.view.showProgress(
        status.running ? `searching, iteration ${status.iterations}` : "",
      );
      if (!status.running) {
        return;
      }
    }
  }

  private async refreshAll(): Promise<void> {
    const sessionId = this.state.sessionId;
    const explanations = await this.api.explanations(sessionId);
    const embedding = await this.api.embedding(sessionId);
    this.state = acceptSummary(this.state, explanations.summary);
    this.view.showScatter(buildScatter(embedding, this.colors));
    this.view.showDashboard(
      buildDashboard(this.state.summary!, this.state.previousSummary),
    );
    this.panels = explanations.clusters.map((cluster) =>
      buildExplanationPanel(cluster, this.colors.colorFor(cluster.node)),
    );
    this.view.showExplanations(this.panels, this.state.selectedCluster);
    this.view.setActions(allowedActions(this.state));
  }
}
