/**
 * Client-side interaction state. Scenes are pure functions of payload
 * plus this state, so leaving a node and returning rebuilds the exact
 * same picture.
 */

export interface ViewState {
  /** node whose views are on screen; null until the tree loads */
  nodeId: string | null;
  /** ordered company selection shared by the global and focus views */
  selection: readonly string[];
  /** firm opened in the reasoning inspector */
  inspectorCompany: string | null;
  hovered: string | null;
  /** focus view time window; null bounds mean full range */
  tFrom: number | null;
  tTo: number | null;
}

export const initialState: ViewState = {
  nodeId: null,
  selection: [],
  inspectorCompany: null,
  hovered: null,
  tFrom: null,
  tTo: null,
};

export function toggleSelection(state: ViewState, companyId: string): ViewState {
  const selection = state.selection.includes(companyId)
    ? state.selection.filter((cid) => cid !== companyId)
    : [...state.selection, companyId];
  return { ...state, selection };
}

export function setNode(state: ViewState, nodeId: string): ViewState {
  return state.nodeId === nodeId ? state : { ...state, nodeId };
}

export function setInspector(state: ViewState, companyId: string | null): ViewState {
  return { ...state, inspectorCompany: companyId };
}

export function setHover(state: ViewState, companyId: string | null): ViewState {
  return state.hovered === companyId ? state : { ...state, hovered: companyId };
}

export function setTimeWindow(
  state: ViewState,
  tFrom: number | null,
  tTo: number | null,
): ViewState {
  return { ...state, tFrom, tTo };
}

type Listener = (state: ViewState) => void;

export class Store {
  private state: ViewState;
  private listeners: Listener[] = [];

  constructor(state: ViewState = initialState) {
    this.state = state;
  }

  get(): ViewState {
    return this.state;
  }

  apply(update: (state: ViewState) => ViewState): void {
    const next = update(this.state);
    if (next === this.state) return;
    this.state = next;
    for (const listener of [...this.listeners]) listener(next);
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }
}
