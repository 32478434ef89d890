// Minimal canvas strip chart for live telemetry traces.

export interface Series {
  label: string;
  color: string;
  values: (p: { t: number; speed: number; steering_angle: number }) => number;
}

export class StripChart {
  private ctx: CanvasRenderingContext2D;

  constructor(
    private canvas: HTMLCanvasElement,
    private series: Series[],
    private range: [number, number],
  ) {
    const ctx = canvas.getContext("2d");
    if (ctx === null) throw new Error("canvas 2d context unavailable");
    this.ctx = ctx;
  }

  draw(history: Array<{ t: number; speed: number; steering_angle: number }>): void {
    const { width, height } = this.canvas;
    const ctx = this.ctx;
    ctx.clearRect(0, 0, width, height);
    ctx.strokeStyle = "#333";
    ctx.strokeRect(0, 0, width, height);
    const [lo, hi] = this.range;
    const zeroY = height - ((0 - lo) / (hi - lo)) * height;
    ctx.strokeStyle = "#2a2a2a";
    ctx.beginPath();
    ctx.moveTo(0, zeroY);
    ctx.lineTo(width, zeroY);
    ctx.stroke();
    if (history.length < 2) return;
    for (const s of this.series) {
      ctx.strokeStyle = s.color;
      ctx.beginPath();
      history.forEach((p, i) => {
        const x = (i / (history.length - 1)) * width;
        const v = Math.max(lo, Math.min(hi, s.values(p)));
        const y = height - ((v - lo) / (hi - lo)) * height;
        if (i === 0) ctx.moveTo(x, y);
        else ctx.lineTo(x, y);
      });
      ctx.stroke();
    }
  }
}
