/**
 * Snap and detach interactions.
 *
 * Geometry here is pure canvas hit-testing: which female anchor is a dragged
 * male near? Whether the two joints actually fit is decided solely by the
 * service — the editor proposes a join, the service answers, and only a
 * `joined: true` answer docks the block. There is no optimistic docking and
 * no local joinability check.
 */

import { ApiClient, StaleRevisionError } from "./api.js";
import { Anchor, BLOCK_W, Scene } from "./scene.js";

/** Snap radius in canvas pixels. */
export const SNAP_RADIUS = 24;

/** Duration of the spring-back animation for a rejected snap. */
export const BOUNCE_MS = 150;

export interface SnapCandidate {
  female: Anchor;
  distance: number;
}

/**
 * Nearest dockable female anchor to a dragged block's male anchor: within
 * `radius`, not occupied, and not on the dragged block itself.
 */
export function findSnapTarget(
  scene: Scene,
  draggedId: number,
  malePos: { x: number; y: number },
  radius: number = SNAP_RADIUS,
): SnapCandidate | null {
  let best: SnapCandidate | null = null;
  for (const anchor of scene.allAnchors()) {
    if (anchor.gender !== "female" || anchor.occupied) {
      continue;
    }
    if (anchor.instanceId === draggedId) {
      continue;
    }
    const distance = Math.hypot(anchor.x - malePos.x, anchor.y - malePos.y);
    if (distance <= radius && (best === null || distance < best.distance)) {
      best = { female: anchor, distance };
    }
  }
  return best;
}

/** Canvas position that puts a block's male anchor exactly on `female`. */
export function dockedPosition(female: Anchor): { x: number; y: number } {
  return { x: female.x - BLOCK_W / 2, y: female.y };
}

export type SnapOutcome =
  | { kind: "snapped"; delta: Record<string, string> }
  | { kind: "bounced" }
  | { kind: "conflict" } // session changed elsewhere; scene was refetched
  | { kind: "network-error"; error: unknown }; // nothing changed; offer retry

export type DetachOutcomeKind =
  | { kind: "detached"; delta: Record<string, string> }
  | { kind: "not-attached" } // no-op: the male is not joined to anything
  | { kind: "conflict" }
  | { kind: "network-error"; error: unknown };

/**
 * Propose joining `maleRef` into `femaleRef`. On `joined: true` the scene
 * docks and re-types joints from the server's delta; on `joined: false` the
 * caller bounces the block back (server state is unchanged). A stale-revision
 * conflict refetches the whole session state.
 */
export async function attemptSnap(
  api: ApiClient,
  scene: Scene,
  sessionId: string,
  maleRef: string,
  femaleRef: string,
): Promise<SnapOutcome> {
  try {
    const outcome = await api.tryJoin(sessionId, maleRef, femaleRef, scene.revision);
    if (!outcome.joined) {
      return { kind: "bounced" };
    }
    scene.applyJoin(maleRef, femaleRef, outcome);
    return { kind: "snapped", delta: outcome.delta };
  } catch (error) {
    if (error instanceof StaleRevisionError) {
      scene.syncFromServer(await api.getState(sessionId));
      return { kind: "conflict" };
    }
    return { kind: "network-error", error };
  }
}

/**
 * Detach the join whose male side is `maleRef`. Joint glyphs revert to
 * whatever types the server reports in its delta.
 */
export async function detachBlock(
  api: ApiClient,
  scene: Scene,
  sessionId: string,
  maleRef: string,
): Promise<DetachOutcomeKind> {
  if (scene.femaleOf(maleRef) === undefined) {
    return { kind: "not-attached" };
  }
  try {
    const outcome = await api.detach(sessionId, maleRef, scene.revision);
    scene.applyDetach(maleRef, outcome);
    return { kind: "detached", delta: outcome.delta };
  } catch (error) {
    if (error instanceof StaleRevisionError) {
      scene.syncFromServer(await api.getState(sessionId));
      return { kind: "conflict" };
    }
    return { kind: "network-error", error };
  }
}
