import { ScatterPoint } from "./viewmodel";

export interface AxisLabels {
  x: string;
  y: string;
}

const PAD = 48;
const POINT_RADIUS = 5;

function scale(values: number[], pixelLo: number, pixelHi: number): (v: number) => number {
  const lo = Math.min(...values);
  const hi = Math.max(...values);
  const span = hi - lo || 1;
  return (v) => pixelLo + ((v - lo) / span) * (pixelHi - pixelLo);
}

/** Draw the trade-off scatter: utilization color fill, frequency border,
 *  A–D labels on the reference states, and a plus marker on the live one. */
export function drawScatter(
  canvas: HTMLCanvasElement,
  points: ScatterPoint[],
  labels: AxisLabels,
): void {
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    return;
  }
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  ctx.font = "11px sans-serif";
  ctx.fillStyle = "#333";
  ctx.fillText(labels.x, canvas.width / 2, canvas.height - 8);
  ctx.save();
  ctx.translate(12, canvas.height / 2);
  ctx.rotate(-Math.PI / 2);
  ctx.fillText(labels.y, 0, 0);
  ctx.restore();

  if (points.length === 0) {
    ctx.fillText("no trade-off data", canvas.width / 2 - 40, canvas.height / 2);
    return;
  }
  const sx = scale(points.map((p) => p.x), PAD, canvas.width - PAD);
  const sy = scale(points.map((p) => p.y), canvas.height - PAD, PAD);

  for (const p of points) {
    const x = sx(p.x);
    const y = sy(p.y);
    ctx.beginPath();
    ctx.arc(x, y, POINT_RADIUS, 0, 2 * Math.PI);
    ctx.fillStyle = p.color;
    ctx.fill();
    ctx.lineWidth = 1.5;
    ctx.strokeStyle = p.borderColor;
    ctx.stroke();
    if (p.marker) {
      ctx.fillStyle = "#000";
      ctx.fillText(p.marker, x + POINT_RADIUS + 2, y - POINT_RADIUS);
    }
  }
  const current = points.find((p) => p.isCurrent);
  if (current) {
    const x = sx(current.x);
    const y = sy(current.y);
    ctx.strokeStyle = "#000";
    ctx.lineWidth = 2;
    ctx.beginPath();
    ctx.moveTo(x - 9, y);
    ctx.lineTo(x + 9, y);
    ctx.moveTo(x, y - 9);
    ctx.lineTo(x, y + 9);
    ctx.stroke();
  }
}
