/** Embedding scatter plot: one color per cluster, no axes.
 *
 * The axes of a nonlinear projection carry no meaning, so only the point
 * layout and the cluster colors are drawn. Hovering a point reveals its
 * index and cluster.
 */

import { ColorAssigner } from "./palette.js";
import { SvgNode } from "./svg.js";
import { EmbeddingResponse } from "./types.js";

export const SCATTER_SIZE = 560;
const MARGIN = 16;
const EMPTY_COLOR = "#c4c8ce";

export function buildScatter(
  embedding: EmbeddingResponse,
  colors: ColorAssigner,
): SvgNode {
  const points = embedding.points;
  const xs = points.map((p) => p[0]);
  const ys = points.map((p) => p[1]);
  const xMin = Math.min(...xs);
  const xMax = Math.max(...xs);
  const yMin = Math.min(...ys);
  const yMax = Math.max(...ys);
  const span = Math.max(xMax - xMin, yMax - yMin) || 1;
  const scale = (SCATTER_SIZE - 2 * MARGIN) / span;

  const circles: SvgNode[] = points.map((point, i) => {
    const label = embedding.labels ? embedding.labels[i] : null;
    const node =
      label !== null && embedding.cluster_nodes ? embedding.cluster_nodes[label] : null;
    return {
      tag: "circle",
      attrs: {
        cx: MARGIN + (point[0] - xMin) * scale,
        cy: SCATTER_SIZE - MARGIN - (point[1] - yMin) * scale,
        r: 3,
        fill: node === null ? EMPTY_COLOR : colors.colorFor(node),
      },
      children: [
        {
          tag: "title",
          text: label === null ? `point ${i}` : `point ${i}, cluster ${label}`,
        },
      ],
    };
  });

  return {
    tag: "svg",
    attrs: {
      viewBox: `0 0 ${SCATTER_SIZE} ${SCATTER_SIZE}`,
      class: "scatter",
      role: "img",
    },
    children: circles,
  };
}
