/**
 * Canvas drawing for the block editor.
 *
 * Blocks render as rounded plates carrying the cross-section silhouette of
 * their male joint's form (palette thumbnail geometry — display only). Male
 * anchors draw as studs on the top edge, female anchors as sockets on the
 * bottom edge; joint type glyphs draw next to their anchor when toggled on.
 */

import { PaletteEntry, Ring } from "./palette.js";
import { Anchor, BLOCK_H, BLOCK_W, Scene, SceneBlock } from "./scene.js";

export interface DragVisual {
  instanceId: number;
  x: number;
  y: number;
  /** Female anchor currently in snap range, if any. */
  candidate: Anchor | null;
}

export interface BounceVisual {
  instanceId: number;
  /** Current offset from the block's resting position, in pixels. */
  dx: number;
  dy: number;
}

export interface SceneView {
  drag?: DragVisual | null;
  bounce?: BounceVisual | null;
  /** Instance whose last interaction needs a cue (e.g. detach of an unattached block). */
  cueInstanceId?: number | null;
}

const COLORS = {
  plate: "#f3f0e8",
  plateEdge: "#5a5348",
  silhouette: "#c9bfa8",
  male: "#2f6fba",
  female: "#b3593a",
  femaleOpen: "#ffffff",
  label: "#1d1a16",
  labelBg: "rgba(255, 255, 250, 0.92)",
  candidate: "#3a9b54",
  cue: "#d4a017",
};

function ringBounds(rings: Ring[]): { x0: number; y0: number; x1: number; y1: number } {
  let x0 = Infinity;
  let y0 = Infinity;
  let x1 = -Infinity;
  let y1 = -Infinity;
  for (const ring of rings) {
    for (const p of ring) {
      x0 = Math.min(x0, p.x);
      y0 = Math.min(y0, p.y);
      x1 = Math.max(x1, p.x);
      y1 = Math.max(y1, p.y);
    }
  }
  return { x0, y0, x1, y1 };
}

function drawSilhouette(
  ctx: CanvasRenderingContext2D,
  rings: Ring[],
  x: number,
  y: number,
  w: number,
  h: number,
): void {
  if (rings.length === 0) {
    return;
  }
  const b = ringBounds(rings);
  const spanX = b.x1 - b.x0 || 1;
  const spanY = b.y1 - b.y0 || 1;
  const scale = Math.min((w * 0.7) / spanX, (h * 0.55) / spanY);
  const cx = x + w / 2 - ((b.x0 + b.x1) / 2) * scale;
  // canvas y grows downward; form y grows upward
  const cy = y + h / 2 + ((b.y0 + b.y1) / 2) * scale;
  ctx.beginPath();
  for (const ring of rings) {
    ring.forEach((p, i) => {
      const px = cx + p.x * scale;
      const py = cy - p.y * scale;
      if (i === 0) {
        ctx.moveTo(px, py);
      } else {
        ctx.lineTo(px, py);
      }
    });
    ctx.closePath();
  }
  ctx.fillStyle = COLORS.silhouette;
  ctx.fill("evenodd");
}

function drawAnchor(ctx: CanvasRenderingContext2D, anchor: Anchor, highlight: boolean): void {
  ctx.beginPath();
  if (anchor.gender === "male") {
    // stud: small upward trapezoid
    ctx.moveTo(anchor.x - 8, anchor.y);
    ctx.lineTo(anchor.x - 5, anchor.y - 8);
    ctx.lineTo(anchor.x + 5, anchor.y - 8);
    ctx.lineTo(anchor.x + 8, anchor.y);
    ctx.closePath();
    ctx.fillStyle = anchor.occupied ? COLORS.plateEdge : COLORS.male;
    ctx.fill();
  } else {
    ctx.arc(anchor.x, anchor.y, 7, 0, Math.PI * 2);
    ctx.fillStyle = anchor.occupied ? COLORS.female : COLORS.femaleOpen;
    ctx.fill();
    ctx.lineWidth = highlight ? 3 : 1.5;
    ctx.strokeStyle = highlight ? COLORS.candidate : COLORS.female;
    ctx.stroke();
  }
}

function drawLabel(ctx: CanvasRenderingContext2D, text: string, x: number, y: number): void {
  ctx.font = "11px ui-monospace, monospace";
  const w = ctx.measureText(text).width + 8;
  ctx.fillStyle = COLORS.labelBg;
  ctx.fillRect(x - w / 2, y - 8, w, 16);
  ctx.strokeStyle = COLORS.plateEdge;
  ctx.lineWidth = 0.5;
  ctx.strokeRect(x - w / 2, y - 8, w, 16);
  ctx.fillStyle = COLORS.label;
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  ctx.fillText(text, x, y);
}

function drawBlock(
  ctx: CanvasRenderingContext2D,
  scene: Scene,
  block: SceneBlock,
  thumbnails: Map<string, Ring[]>,
  view: SceneView,
): void {
  let { x, y } = block;
  if (view.drag && view.drag.instanceId === block.instanceId) {
    x = view.drag.x;
    y = view.drag.y;
  } else if (view.bounce && view.bounce.instanceId === block.instanceId) {
    x += view.bounce.dx;
    y += view.bounce.dy;
  }

  ctx.save();
  if (view.drag?.instanceId === block.instanceId) {
    ctx.globalAlpha = 0.8;
  }
  ctx.beginPath();
  ctx.roundRect(x, y, BLOCK_W, BLOCK_H, 8);
  ctx.fillStyle = COLORS.plate;
  ctx.fill();
  ctx.lineWidth = view.cueInstanceId === block.instanceId ? 3 : 1.5;
  ctx.strokeStyle =
    view.cueInstanceId === block.instanceId ? COLORS.cue : COLORS.plateEdge;
  ctx.stroke();

  drawSilhouette(ctx, thumbnails.get(block.cons) ?? [], x, y, BLOCK_W, BLOCK_H);

  ctx.fillStyle = COLORS.label;
  ctx.font = "bold 12px ui-sans-serif, sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "middle";
  const title =
    block.annotation === null ? block.cons : `${block.cons}:[${block.annotation}]`;
  ctx.fillText(title, x + BLOCK_W / 2, y + BLOCK_H / 2, BLOCK_W - 12);

  // anchors at the block's *visual* position
  const shiftX = x - block.x;
  const shiftY = y - block.y;
  for (const anchor of scene.anchors(block)) {
    const moved: Anchor = { ...anchor, x: anchor.x + shiftX, y: anchor.y + shiftY };
    const highlight =
      view.drag?.candidate != null && view.drag.candidate.ref === anchor.ref;
    drawAnchor(ctx, moved, highlight);
    const joint = scene.findJoint(anchor.ref);
    if (joint && joint.labelVisible) {
      const ly = anchor.gender === "male" ? moved.y - 18 : moved.y + 18;
      drawLabel(ctx, joint.type, moved.x, ly);
    }
  }
  ctx.restore();
}

function drawJoinLinks(ctx: CanvasRenderingContext2D, scene: Scene, view: SceneView): void {
  const anchorByRef = new Map<string, Anchor>();
  for (const anchor of scene.allAnchors()) {
    anchorByRef.set(anchor.ref, anchor);
  }
  ctx.strokeStyle = COLORS.plateEdge;
  ctx.lineWidth = 2;
  for (const { male, female } of scene.joins) {
    if (view.drag) {
      const [mi] = male.split(".");
      const [fi] = female.split(".");
      const dragged = String(view.drag.instanceId);
      if (mi === dragged || fi === dragged) {
        continue; // link follows the drop, not the drag ghost
      }
    }
    const m = anchorByRef.get(male);
    const f = anchorByRef.get(female);
    if (m && f) {
      ctx.beginPath();
      ctx.moveTo(m.x, m.y);
      ctx.lineTo(f.x, f.y);
      ctx.stroke();
    }
  }
}

/** Redraw the whole scene. */
export function renderScene(
  ctx: CanvasRenderingContext2D,
  scene: Scene,
  palette: PaletteEntry[],
  view: SceneView = {},
): void {
  const canvas = ctx.canvas;
  ctx.clearRect(0, 0, canvas.width, canvas.height);
  const thumbnails = new Map(palette.map((p) => [p.consName, p.thumbnail]));
  drawJoinLinks(ctx, scene, view);
  const blocks = [...scene.blocks.values()];
  // draw the dragged block last so it floats above the rest
  blocks.sort((a, b) =>
    a.instanceId === view.drag?.instanceId
      ? 1
      : b.instanceId === view.drag?.instanceId
        ? -1
        : a.instanceId - b.instanceId,
  );
  for (const block of blocks) {
    drawBlock(ctx, scene, block, thumbnails, view);
  }
}

/** Draw one palette entry into its sidebar tile canvas. */
export function renderPaletteTile(
  ctx: CanvasRenderingContext2D,
  entry: PaletteEntry,
): void {
  const { width, height } = ctx.canvas;
  ctx.clearRect(0, 0, width, height);
  ctx.beginPath();
  ctx.roundRect(2, 2, width - 4, height - 4, 6);
  ctx.fillStyle = COLORS.plate;
  ctx.fill();
  ctx.strokeStyle = COLORS.plateEdge;
  ctx.lineWidth = 1;
  ctx.stroke();
  drawSilhouette(ctx, entry.thumbnail, 2, 2, width - 4, height - 4);
  ctx.fillStyle = COLORS.label;
  ctx.font = "bold 11px ui-sans-serif, sans-serif";
  ctx.textAlign = "center";
  ctx.textBaseline = "alphabetic";
  ctx.fillText(entry.consName, width / 2, height - 8, width - 10);
}
