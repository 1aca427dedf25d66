/**
 * Browser entry point: one editing session per tab.
 *
 * Interaction rules:
 *  - drag a palette tile onto the canvas to add a block;
 *  - drag a block and release near an open socket to propose a join — the
 *    service decides; a refusal springs the block back (150 ms), acceptance
 *    docks it and re-types joint glyphs from the server delta;
 *  - double-click a block to detach its male joint (no-op cue if unattached);
 *  - click an anchor to toggle that joint's type glyph, or use the toolbar
 *    switch for all of them;
 *  - a failed network call never changes the scene: the status bar offers
 *    Retry instead.
 */

import { ApiClient } from "./api.js";
import { buildPalette, PaletteEntry } from "./palette.js";
import { renderPaletteTile, renderScene, SceneView } from "./render.js";
import { BLOCK_H, BLOCK_W, Scene } from "./scene.js";
import {
  attemptSnap,
  BOUNCE_MS,
  detachBlock,
  dockedPosition,
  findSnapTarget,
  SNAP_RADIUS,
} from "./snap.js";

const API_BASE =
  new URLSearchParams(location.search).get("api") ?? "http://127.0.0.1:8571";

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

interface DragState {
  instanceId: number;
  offsetX: number;
  offsetY: number;
  x: number;
  y: number;
  moved: boolean;
  originX: number;
  originY: number;
}

async function boot(): Promise<void> {
  const api = new ApiClient(API_BASE);
  const canvas = el<HTMLCanvasElement>("scene");
  const ctx = canvas.getContext("2d");
  if (!ctx) {
    throw new Error("2d canvas unsupported");
  }
  const paletteBox = el<HTMLDivElement>("palette");
  const status = el<HTMLSpanElement>("status");
  const revisionBox = el<HTMLSpanElement>("revision");
  const retryBtn = el<HTMLButtonElement>("retry");
  const labelsToggle = el<HTMLInputElement>("labels");
  const annotationInput = el<HTMLInputElement>("annotation");
  const configSelect = el<HTMLSelectElement>("config");
  const configUpload = el<HTMLInputElement>("config-upload");

  const scene = new Scene();
  let palette: PaletteEntry[] = [];
  let sessionId = "";
  let drag: DragState | null = null;
  let view: SceneView = {};
  let retryAction: (() => Promise<void>) | null = null;

  const redraw = () => {
    renderScene(ctx, scene, palette, view);
    revisionBox.textContent = `rev ${scene.revision}`;
  };

  const say = (text: string) => {
    status.textContent = text;
    retryBtn.hidden = true;
    retryAction = null;
  };

  const offerRetry = (text: string, action: () => Promise<void>) => {
    status.textContent = `${text} — network failed, nothing changed`;
    retryAction = action;
    retryBtn.hidden = false;
  };

  retryBtn.addEventListener("click", () => {
    const action = retryAction;
    say("retrying…");
    if (action) {
      void action();
    }
  });

  const flashCue = (instanceId: number, text: string) => {
    say(text);
    view = { ...view, cueInstanceId: instanceId };
    redraw();
    setTimeout(() => {
      view = { ...view, cueInstanceId: null };
      redraw();
    }, 600);
  };

  // -- session / palette ------------------------------------------------------

  async function openSession(configId: string): Promise<void> {
    say(`loading ${configId}…`);
    const created = await api.createSession(configId);
    sessionId = created.sessionId;
    scene.syncFromServer(await api.getState(sessionId));
    palette = await buildPalette(api, configId);
    paletteBox.replaceChildren();
    for (const entry of palette) {
      const tile = document.createElement("canvas");
      tile.width = 92;
      tile.height = 72;
      tile.className = "tile";
      tile.title = entry.joints
        .map((j) => `${j.slot} (${j.gender}): ${j.type}`)
        .join("\n");
      const tctx = tile.getContext("2d");
      if (tctx) {
        renderPaletteTile(tctx, entry);
      }
      tile.addEventListener("pointerdown", (ev) => {
        ev.preventDefault();
        void addBlockAt(entry.consName, 60, 40);
      });
      paletteBox.append(tile);
    }
    say(`session ${sessionId} on ${configId}`);
    redraw();
  }

  async function refreshConfigs(selected?: string): Promise<void> {
    const { configs } = await api.listConfigs();
    configSelect.replaceChildren(
      ...configs.map((id) => new Option(id, id, false, id === selected)),
    );
  }

  configSelect.addEventListener("change", () => {
    void openSession(configSelect.value);
  });

  configUpload.addEventListener("change", async () => {
    const file = configUpload.files?.[0];
    if (!file) {
      return;
    }
    try {
      const doc = JSON.parse(await file.text());
      const { configId } = await api.uploadConfig(doc);
      await refreshConfigs(configId);
      await openSession(configId);
    } catch (error) {
      say(`config rejected: ${error instanceof Error ? error.message : error}`);
    }
  });

  // -- adding blocks ------------------------------------------------------------

  async function addBlockAt(consName: string, x: number, y: number): Promise<void> {
    const annotation = annotationInput.value.trim();
    const full = annotation ? `${consName}:[${annotation}]` : consName;
    const run = async () => {
      try {
        const added = await api.addBlock(sessionId, full);
        scene.applyBlockAdded(full, added, x, y);
        say(`added ${full} as block ${added.instanceId}`);
        redraw();
      } catch (error) {
        if (error instanceof TypeError) {
          offerRetry(`add ${full}`, run);
        } else {
          say(`rejected: ${error instanceof Error ? error.message : error}`);
        }
      }
    };
    await run();
  }

  // -- dragging / snapping --------------------------------------------------------

  const canvasPos = (ev: PointerEvent) => {
    const r = canvas.getBoundingClientRect();
    return { x: ev.clientX - r.left, y: ev.clientY - r.top };
  };

  const blockAt = (x: number, y: number) => {
    const all = [...scene.blocks.values()];
    for (let i = all.length - 1; i >= 0; i -= 1) {
      const b = all[i]!;
      if (x >= b.x && x <= b.x + BLOCK_W && y >= b.y && y <= b.y + BLOCK_H) {
        return b;
      }
    }
    return null;
  };

  const anchorAt = (x: number, y: number) => {
    for (const anchor of scene.allAnchors()) {
      if (Math.hypot(anchor.x - x, anchor.y - y) <= 10) {
        return anchor;
      }
    }
    return null;
  };

  canvas.addEventListener("pointerdown", (ev) => {
    const { x, y } = canvasPos(ev);
    const anchor = anchorAt(x, y);
    if (anchor) {
      const joint = scene.findJoint(anchor.ref);
      if (joint) {
        scene.setLabelVisible(anchor.ref, !joint.labelVisible);
        redraw();
      }
      return;
    }
    const block = blockAt(x, y);
    if (!block) {
      return;
    }
    drag = {
      instanceId: block.instanceId,
      offsetX: x - block.x,
      offsetY: y - block.y,
      x: block.x,
      y: block.y,
      moved: false,
      originX: block.x,
      originY: block.y,
    };
    canvas.setPointerCapture(ev.pointerId);
  });

  canvas.addEventListener("pointermove", (ev) => {
    if (!drag) {
      return;
    }
    const { x, y } = canvasPos(ev);
    drag.x = x - drag.offsetX;
    drag.y = y - drag.offsetY;
    drag.moved = true;
    const malePos = { x: drag.x + BLOCK_W / 2, y: drag.y };
    const candidate = findSnapTarget(scene, drag.instanceId, malePos, SNAP_RADIUS);
    view = { ...view, drag: { instanceId: drag.instanceId, x: drag.x, y: drag.y, candidate: candidate?.female ?? null } };
    redraw();
  });

  canvas.addEventListener("pointerup", (ev) => {
    if (!drag) {
      return;
    }
    const done = drag;
    drag = null;
    canvas.releasePointerCapture(ev.pointerId);
    view = { ...view, drag: null };
    if (!done.moved) {
      redraw();
      return;
    }
    void settleDrop(done);
  });

  async function settleDrop(done: DragState): Promise<void> {
    const block = scene.blocks.get(done.instanceId);
    if (!block) {
      redraw();
      return;
    }
    const maleJoint = block.joints.find((j) => j.gender === "male");
    const malePos = { x: done.x + BLOCK_W / 2, y: done.y };
    const candidate =
      maleJoint && scene.femaleOf(maleJoint.ref) === undefined
        ? findSnapTarget(scene, done.instanceId, malePos, SNAP_RADIUS)
        : null;
    if (!candidate || !maleJoint) {
      scene.moveBlock(done.instanceId, done.x, done.y);
      redraw();
      return;
    }
    const run = async () => {
      say("checking fit…");
      const result = await attemptSnap(
        api,
        scene,
        sessionId,
        maleJoint.ref,
        candidate.female.ref,
      );
      switch (result.kind) {
        case "snapped": {
          const pos = dockedPosition(candidate.female);
          scene.moveBlock(done.instanceId, pos.x, pos.y);
          say(`joined ${maleJoint.ref} → ${candidate.female.ref}`);
          redraw();
          break;
        }
        case "bounced":
          say(`does not fit: ${maleJoint.ref} into ${candidate.female.ref}`);
          springBack(done);
          break;
        case "conflict":
          say("session changed elsewhere — scene refreshed");
          redraw();
          break;
        case "network-error":
          offerRetry(`join ${maleJoint.ref} → ${candidate.female.ref}`, run);
          redraw();
          break;
      }
    };
    await run();
  }

  /** Animate a refused block from the drop point back to where it started. */
  function springBack(done: DragState): void {
    const from = { x: done.x, y: done.y };
    const start = performance.now();
    const step = (now: number) => {
      const t = Math.min((now - start) / BOUNCE_MS, 1);
      const ease = 1 - (1 - t) * (1 - t);
      view = {
        ...view,
        bounce: {
          instanceId: done.instanceId,
          dx: (from.x - done.originX) * (1 - ease),
          dy: (from.y - done.originY) * (1 - ease),
        },
      };
      redraw();
      if (t < 1) {
        requestAnimationFrame(step);
      } else {
        view = { ...view, bounce: null };
        redraw();
      }
    };
    requestAnimationFrame(step);
  }

  // -- detaching ---------------------------------------------------------------

  canvas.addEventListener("dblclick", (ev) => {
    const r = canvas.getBoundingClientRect();
    const block = blockAt(ev.clientX - r.left, ev.clientY - r.top);
    if (!block) {
      return;
    }
    const maleJoint = block.joints.find((j) => j.gender === "male");
    if (!maleJoint) {
      flashCue(block.instanceId, `${block.cons} has no male joint`);
      return;
    }
    const run = async () => {
      const result = await detachBlock(api, scene, sessionId, maleJoint.ref);
      switch (result.kind) {
        case "detached":
          say(`detached ${maleJoint.ref}`);
          scene.moveBlock(block.instanceId, block.x, block.y + BLOCK_H / 2);
          redraw();
          break;
        case "not-attached":
          flashCue(block.instanceId, `${maleJoint.ref} is not attached`);
          break;
        case "conflict":
          say("session changed elsewhere — scene refreshed");
          redraw();
          break;
        case "network-error":
          offerRetry(`detach ${maleJoint.ref}`, run);
          break;
      }
    };
    void run();
  });

  labelsToggle.addEventListener("change", () => {
    scene.setAllLabels(labelsToggle.checked);
    redraw();
  });

  await refreshConfigs("standard");
  await openSession(configSelect.value || "standard");
}

void boot().catch((error) => {
  const status = document.getElementById("status");
  if (status) {
    status.textContent = `failed to start: ${error instanceof Error ? error.message : error}`;
  }
});
