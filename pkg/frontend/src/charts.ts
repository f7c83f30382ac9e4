/** Explanation charts: stacked bars for boolean attributes, density curves
 * for real ones, each comparing the selected cluster with the full data.
 */

import { SvgNode } from "./svg.js";
import {
  AttributeExplanation,
  BooleanStatDoc,
  ClusterExplanation,
  RealStatDoc,
} from "./types.js";

export const CHART_WIDTH = 260;
export const CHART_HEIGHT = 150;
export const PDF_SAMPLES = 200;

const TRUE_COLOR = "#4269d0";
const FALSE_COLOR = "#d3d6db";
const PRIOR_COLOR = "#9498a0";

/** Two stacked bars: cluster distribution on the left, full data on the right. */
export function buildStackedBars(
  cluster: BooleanStatDoc,
  prior: BooleanStatDoc,
  clusterColor: string = TRUE_COLOR,
): SvgNode {
  const barWidth = 64;
  const gap = 56;
  const x0 = (CHART_WIDTH - 2 * barWidth - gap) / 2;
  const bars: SvgNode[] = [];
  const columns: [number, number, string][] = [
    [cluster.frequency, x0, "cluster"],
    [prior.frequency, x0 + barWidth + gap, "overall"],
  ];
  for (const [frequency, x, which] of columns) {
    const trueHeight = frequency * (CHART_HEIGHT - 30);
    const falseHeight = (1 - frequency) * (CHART_HEIGHT - 30);
    bars.push({
      tag: "rect",
      attrs: {
        x,
        y: 10,
        width: barWidth,
        height: falseHeight,
        fill: FALSE_COLOR,
        "data-part": `${which}-false`,
      },
    });
    bars.push({
      tag: "rect",
      attrs: {
        x,
        y: 10 + falseHeight,
        width: barWidth,
        height: trueHeight,
        fill: which === "cluster" ? clusterColor : TRUE_COLOR,
        "data-part": `${which}-true`,
      },
    });
    bars.push({
      tag: "text",
      attrs: { x: x + barWidth / 2, y: CHART_HEIGHT - 4, "text-anchor": "middle", class: "bar-label" },
      text: which,
    });
  }
  return {
    tag: "svg",
    attrs: { viewBox: `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`, class: "chart bars" },
    children: bars,
  };
}

function gaussianPdf(x: number, mean: number, stdev: number): number {
  const z = (x - mean) / stdev;
  return Math.exp(-0.5 * z * z) / (stdev * Math.sqrt(2 * Math.PI));
}

export function pdfCurvePoints(
  stat: RealStatDoc,
  lo: number,
  hi: number,
  samples: number = PDF_SAMPLES,
): [number, number][] {
  const out: [number, number][] = [];
  for (let i = 0; i < samples; i += 1) {
    const x = lo + ((hi - lo) * i) / (samples - 1);
    out.push([x, gaussianPdf(x, stat.mean, stat.stdev)]);
  }
  return out;
}

/** Cluster and prior density curves on a shared axis spanning mean ± 4·stdev. */
export function buildPdfCurves(
  cluster: RealStatDoc,
  prior: RealStatDoc,
  clusterColor: string = TRUE_COLOR,
): SvgNode {
  const lo = Math.min(cluster.mean - 4 * cluster.stdev, prior.mean - 4 * prior.stdev);
  const hi = Math.max(cluster.mean + 4 * cluster.stdev, prior.mean + 4 * prior.stdev);
  const clusterPoints = pdfCurvePoints(cluster, lo, hi);
  const priorPoints = pdfCurvePoints(prior, lo, hi);
  const peak = Math.max(
    ...clusterPoints.map((p) => p[1]),
    ...priorPoints.map((p) => p[1]),
  );
  const toPath = (points: [number, number][]) =>
    points
      .map(([x, y], i) => {
        const px = ((x - lo) / (hi - lo)) * CHART_WIDTH;
        const py = CHART_HEIGHT - 12 - (y / peak) * (CHART_HEIGHT - 24);
        return `${i === 0 ? "M" : "L"}${px.toFixed(2)},${py.toFixed(2)}`;
      })
      .join(" ");
  return {
    tag: "svg",
    attrs: { viewBox: `0 0 ${CHART_WIDTH} ${CHART_HEIGHT}`, class: "chart pdf" },
    children: [
      {
        tag: "path",
        attrs: { d: toPath(priorPoints), stroke: PRIOR_COLOR, fill: "none", "data-curve": "prior" },
      },
      {
        tag: "path",
        attrs: { d: toPath(clusterPoints), stroke: clusterColor, fill: "none", "data-curve": "cluster" },
      },
    ],
  };
}

export function buildAttributeChart(
  attribute: AttributeExplanation,
  clusterColor?: string,
): SvgNode {
  if (attribute.type === "boolean") {
    return buildStackedBars(
      attribute.cluster as BooleanStatDoc,
      attribute.prior as BooleanStatDoc,
      clusterColor,
    );
  }
  return buildPdfCurves(
    attribute.cluster as RealStatDoc,
    attribute.prior as RealStatDoc,
    clusterColor,
  );
}

export interface ExplanationPanel {
  header: string;
  charts: { title: string; svg: SvgNode }[];
}

/** Panel for one cluster: relative size header, one chart per attribute in
 *  server order (already sorted by decreasing information). */
export function buildExplanationPanel(
  view: ClusterExplanation,
  clusterColor?: string,
): ExplanationPanel {
  const percent = (view.relative_size * 100).toFixed(1);
  return {
    header: `Cluster ${view.cluster}: ${view.size} points (${percent}% of the data)`,
    charts: view.attributes.map((attribute) => ({
      title: `${attribute.name} (${attribute.information.toFixed(1)} bits)`,
      svg: buildAttributeChart(attribute, clusterColor),
    })),
  };
}
