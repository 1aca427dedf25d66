/**
 * Scene model: the editor's client-side record of one assembly session.
 *
 * The scene never decides whether joints fit — it only replays what the
 * service reported: blocks added, join/detach deltas, or a full state
 * refetch. `logicalState()` projects the scene onto exactly the shape of
 * `GET /sessions/{id}/state` (minus canvas positions), so conformance is a
 * deep equality check.
 */

import {
  BlockAdded,
  DetachOutcome,
  JoinOutcome,
  JoinPair,
  SessionState,
} from "./api.js";

export interface SceneJoint {
  ref: string; // "3.arg0"
  slot: string; // "arg0"
  gender: "male" | "female";
  type: string; // printed type per the service, kept current via deltas
  labelVisible: boolean; // type glyphs start hidden
}

export interface SceneBlock {
  instanceId: number;
  consName: string; // as sent to the service, e.g. "Cons:[List Bool]"
  cons: string;
  annotation: string | null;
  x: number;
  y: number;
  joints: SceneJoint[]; // male first (if any), then arg0, arg1, ...
}

export interface Anchor {
  ref: string;
  instanceId: number;
  gender: "male" | "female";
  x: number;
  y: number;
  occupied: boolean;
}

export const BLOCK_W = 120;
export const BLOCK_H = 90;

// -- annotation text normalization -------------------------------------------
//
// The service echoes annotations through its own parser and printer, so
// "Cons:[( List  Bool )]" is stored as annotation "List Bool". The scene
// applies the same normalization (display bookkeeping only — no judgement
// about types is made here) so its logical state matches the server's.

interface TypeNode {
  head: string;
  args: TypeNode[];
}

function tokenizeType(text: string): string[] {
  const tokens: string[] = [];
  let i = 0;
  while (i < text.length) {
    const ch = text[i]!;
    if (ch === " " || ch === "\t" || ch === "\n") {
      i += 1;
    } else if (ch === "(" || ch === ")") {
      tokens.push(ch);
      i += 1;
    } else {
      let j = i;
      while (j < text.length && !" \t\n()".includes(text[j]!)) {
        j += 1;
      }
      tokens.push(text.slice(i, j));
      i = j;
    }
  }
  return tokens;
}

function parseTypeTokens(tokens: string[], pos: { i: number }): TypeNode {
  const parts: TypeNode[] = [];
  while (pos.i < tokens.length) {
    const tok = tokens[pos.i]!;
    if (tok === ")") {
      break;
    }
    if (tok === "(") {
      pos.i += 1;
      const inner = parseTypeTokens(tokens, pos);
      if (tokens[pos.i] !== ")") {
        throw new Error(`unbalanced parenthesis in type text`);
      }
      pos.i += 1;
      parts.push(inner);
    } else {
      pos.i += 1;
      parts.push({ head: tok, args: [] });
    }
  }
  if (parts.length === 0) {
    throw new Error("empty type text");
  }
  const [first, ...rest] = parts;
  // Application is left-associated onto the first token/group.
  return rest.length === 0 ? first! : { head: first!.head, args: [...first!.args, ...rest] };
}

function printTypeNode(node: TypeNode, nested: boolean): string {
  if (node.args.length === 0) {
    return node.head;
  }
  const body =
    node.head + " " + node.args.map((a) => printTypeNode(a, true)).join(" ");
  return nested ? `(${body})` : body;
}

/**
 * Normalize a type's textual spelling (whitespace, redundant parentheses) the
 * way the service's printer does. Unparseable text is returned trimmed — the
 * service will reject the block anyway and nothing gets recorded.
 */
export function normalizeTypeText(text: string): string {
  try {
    const tokens = tokenizeType(text);
    const pos = { i: 0 };
    const node = parseTypeTokens(tokens, pos);
    if (pos.i !== tokens.length) {
      return text.trim();
    }
    return printTypeNode(node, false);
  } catch {
    return text.trim();
  }
}

/** Split "Cons:[List Bool]" into its constructor name and annotation text. */
export function splitConsName(consName: string): {
  cons: string;
  annotation: string | null;
} {
  const open = consName.indexOf(":[");
  if (open < 0 || !consName.endsWith("]")) {
    return { cons: consName.trim(), annotation: null };
  }
  return {
    cons: consName.slice(0, open).trim(),
    annotation: normalizeTypeText(consName.slice(open + 2, -1)),
  };
}

function refParts(ref: string): [number, string] {
  const dot = ref.indexOf(".");
  return [Number(ref.slice(0, dot)), ref.slice(dot + 1)];
}

function compareRefs(a: string, b: string): number {
  const [ai, as] = refParts(a);
  const [bi, bs] = refParts(b);
  if (ai !== bi) {
    return ai - bi;
  }
  return as < bs ? -1 : as > bs ? 1 : 0;
}

function slotOrder(slot: string): number {
  // joint listings put the male joint first, then args in index order
  return slot === "male" ? -1 : Number(slot.slice(3));
}

export interface LogicalState {
  instances: { id: number; cons: string; annotation: string | null }[];
  joins: JoinPair[];
  jointTypes: Record<string, string>;
}

export class Scene {
  revision = 0;
  readonly blocks = new Map<number, SceneBlock>();
  private readonly joinsByMale = new Map<string, string>();

  // -- applying service responses --------------------------------------------

  applyBlockAdded(consName: string, added: BlockAdded, x: number, y: number): SceneBlock {
    const { cons, annotation } = splitConsName(consName);
    const block: SceneBlock = {
      instanceId: added.instanceId,
      consName,
      cons,
      annotation,
      x,
      y,
      joints: added.joints.map((j) => ({
        ref: j.ref,
        slot: j.ref.slice(j.ref.indexOf(".") + 1),
        gender: j.gender,
        type: j.type,
        labelVisible: false,
      })),
    };
    this.blocks.set(block.instanceId, block);
    this.revision = added.revision;
    return block;
  }

  /** Record a join the service accepted, re-typing joints per its delta. */
  applyJoin(male: string, female: string, outcome: JoinOutcome): void {
    if (!outcome.joined) {
      return; // a bounce: the server state did not change
    }
    this.joinsByMale.set(male, female);
    this.applyDelta(outcome.delta);
    this.revision = outcome.revision;
  }

  /** Record a detach the service performed, re-typing joints per its delta. */
  applyDetach(male: string, outcome: DetachOutcome): void {
    if (!outcome.removed) {
      return;
    }
    this.joinsByMale.delete(male);
    this.applyDelta(outcome.delta);
    this.revision = outcome.revision;
  }

  private applyDelta(delta: Record<string, string>): void {
    for (const [ref, type] of Object.entries(delta)) {
      const joint = this.findJoint(ref);
      if (joint) {
        joint.type = type;
      }
    }
  }

  /**
   * Rebuild from a full state fetch (used after a stale-revision conflict).
   * Canvas positions of surviving blocks are kept; new blocks are laid out on
   * a simple grid.
   */
  syncFromServer(state: SessionState): void {
    const oldPositions = new Map<number, { x: number; y: number }>();
    const oldLabels = new Map<string, boolean>();
    for (const block of this.blocks.values()) {
      oldPositions.set(block.instanceId, { x: block.x, y: block.y });
      for (const joint of block.joints) {
        oldLabels.set(joint.ref, joint.labelVisible);
      }
    }
    this.blocks.clear();
    this.joinsByMale.clear();

    const slotsByInstance = new Map<number, string[]>();
    for (const ref of Object.keys(state.jointTypes)) {
      const [iid, slot] = refParts(ref);
      const slots = slotsByInstance.get(iid) ?? [];
      slots.push(slot);
      slotsByInstance.set(iid, slots);
    }

    let laid = 0;
    for (const inst of state.instances) {
      const pos = oldPositions.get(inst.id) ?? {
        x: 40 + (laid % 5) * (BLOCK_W + 40),
        y: 40 + Math.floor(laid / 5) * (BLOCK_H + 60),
      };
      if (!oldPositions.has(inst.id)) {
        laid += 1;
      }
      const slots = (slotsByInstance.get(inst.id) ?? []).sort(
        (a, b) => slotOrder(a) - slotOrder(b),
      );
      const consName =
        inst.annotation === null ? inst.cons : `${inst.cons}:[${inst.annotation}]`;
      this.blocks.set(inst.id, {
        instanceId: inst.id,
        consName,
        cons: inst.cons,
        annotation: inst.annotation,
        x: pos.x,
        y: pos.y,
        joints: slots.map((slot) => {
          const ref = `${inst.id}.${slot}`;
          return {
            ref,
            slot,
            gender: slot === "male" ? "male" : "female",
            type: state.jointTypes[ref]!,
            labelVisible: oldLabels.get(ref) ?? false,
          };
        }),
      });
    }
    for (const join of state.joins) {
      this.joinsByMale.set(join.male, join.female);
    }
    this.revision = state.revision;
  }

  // -- queries ----------------------------------------------------------------

  findJoint(ref: string): SceneJoint | undefined {
    const [iid] = refParts(ref);
    return this.blocks.get(iid)?.joints.find((j) => j.ref === ref);
  }

  femaleOf(male: string): string | undefined {
    return this.joinsByMale.get(male);
  }

  get joins(): JoinPair[] {
    return [...this.joinsByMale.entries()]
      .sort(([a], [b]) => compareRefs(a, b))
      .map(([male, female]) => ({ male, female }));
  }

  /** Snap anchors: male at the top edge, females spaced along the bottom. */
  anchors(block: SceneBlock): Anchor[] {
    const females = block.joints.filter((j) => j.gender === "female");
    const out: Anchor[] = [];
    for (const joint of block.joints) {
      if (joint.gender === "male") {
        out.push({
          ref: joint.ref,
          instanceId: block.instanceId,
          gender: "male",
          x: block.x + BLOCK_W / 2,
          y: block.y,
          occupied: this.joinsByMale.has(joint.ref),
        });
      } else {
        const k = females.indexOf(joint);
        out.push({
          ref: joint.ref,
          instanceId: block.instanceId,
          gender: "female",
          x: block.x + (BLOCK_W * (k + 1)) / (females.length + 1),
          y: block.y + BLOCK_H,
          occupied: this.isFemaleOccupied(joint.ref),
        });
      }
    }
    return out;
  }

  isFemaleOccupied(femaleRef: string): boolean {
    for (const female of this.joinsByMale.values()) {
      if (female === femaleRef) {
        return true;
      }
    }
    return false;
  }

  allAnchors(): Anchor[] {
    const out: Anchor[] = [];
    for (const block of this.blocks.values()) {
      out.push(...this.anchors(block));
    }
    return out;
  }

  moveBlock(instanceId: number, x: number, y: number): void {
    const block = this.blocks.get(instanceId);
    if (block) {
      block.x = x;
      block.y = y;
    }
  }

  setLabelVisible(ref: string, visible: boolean): void {
    const joint = this.findJoint(ref);
    if (joint) {
      joint.labelVisible = visible;
    }
  }

  /** Flip every joint label at once (the toolbar's "show types" toggle). */
  setAllLabels(visible: boolean): void {
    for (const block of this.blocks.values()) {
      for (const joint of block.joints) {
        joint.labelVisible = visible;
      }
    }
  }

  /**
   * The scene as the service would report it: same shapes, same orderings as
   * `GET /sessions/{id}/state` (positions and label visibility excluded).
   */
  logicalState(): LogicalState {
    const instances = [...this.blocks.values()]
      .sort((a, b) => a.instanceId - b.instanceId)
      .map((b) => ({ id: b.instanceId, cons: b.cons, annotation: b.annotation }));
    const jointTypes: Record<string, string> = {};
    const refs: string[] = [];
    for (const block of this.blocks.values()) {
      for (const joint of block.joints) {
        refs.push(joint.ref);
      }
    }
    refs.sort(); // the service emits jointTypes keyed in string order
    for (const ref of refs) {
      jointTypes[ref] = this.findJoint(ref)!.type;
    }
    return { instances, joins: this.joins, jointTypes };
  }
}
