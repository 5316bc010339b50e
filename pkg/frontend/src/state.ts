/** Editor state machine, independent of the DOM.
 *
 * Every displayed option comes from the last service response; the client
 * never invents or submits tokens outside that set. The token history is
 * the source of truth: an expired session is rebuilt by replaying it.
 */

import {
  CreateResponse,
  PushResponse,
  ServiceError,
  StateResponse,
  WireAntecedent,
  WireOption,
  WireTreeNode,
} from "./api.js";

export interface EditorApi {
  createSession(grammarId: string): Promise<CreateResponse>;
  pushToken(sessionId: string, token: string): Promise<PushResponse>;
  popToken(sessionId: string): Promise<StateResponse>;
  getTree(sessionId: string): Promise<WireTreeNode[]>;
}

export type Listener = () => void;

export class Editor {
  grammarId: string | null = null;
  sessionId: string | null = null;
  tokens: string[] = [];
  options: WireOption[] = [];
  antecedents: WireAntecedent[] = [];
  complete = false;
  pending = false;
  trees: WireTreeNode[] | null = null;
  notice = "";

  private listeners: Listener[] = [];

  constructor(private api: EditorApi) {}

  onChange(listener: Listener): void {
    this.listeners.push(listener);
  }

  private emit(): void {
    for (const listener of this.listeners) listener();
  }

  /** Options grouped by category name for the menu; literal words group
   * under "word". */
  groupedOptions(): Map<string, WireOption[]> {
    const groups = new Map<string, WireOption[]>();
    for (const option of this.options) {
      const key = option.category || "word";
      const bucket = groups.get(key) ?? [];
      bucket.push(option);
      groups.set(key, bucket);
    }
    for (const bucket of groups.values()) {
      bucket.sort((a, b) => a.token.localeCompare(b.token));
    }
    return new Map([...groups.entries()].sort((a, b) => a[0].localeCompare(b[0])));
  }

  hasOption(token: string): boolean {
    return this.options.some((o) => o.token === token);
  }

  private async guarded<T>(work: () => Promise<T>): Promise<T> {
    if (this.pending) throw new Error("request already in flight");
    this.pending = true;
    this.emit();
    try {
      return await work();
    } finally {
      this.pending = false;
      this.emit();
    }
  }

  async start(grammarId: string): Promise<void> {
    await this.guarded(async () => {
      const created = await this.api.createSession(grammarId);
      this.grammarId = grammarId;
      this.sessionId = created.session_id;
      this.tokens = [];
      this.options = created.options;
      this.antecedents = [];
      this.complete = created.complete;
      this.trees = null;
      this.notice = "";
    });
  }

  /** Re-create the session and replay the committed history. */
  private async recover(): Promise<string> {
    const created = await this.api.createSession(this.grammarId!);
    this.sessionId = created.session_id;
    let state: StateResponse = { options: created.options, antecedents: [], complete: created.complete };
    for (const token of this.tokens) {
      state = await this.api.pushToken(created.session_id, token);
    }
    this.options = state.options;
    this.antecedents = state.antecedents;
    this.complete = state.complete;
    return created.session_id;
  }

  private async withSession<T>(work: (sessionId: string) => Promise<T>): Promise<T> {
    try {
      return await work(this.sessionId!);
    } catch (error) {
      if (error instanceof ServiceError && error.status === 404 && this.grammarId !== null) {
        return work(await this.recover());
      }
      throw error;
    }
  }

  async commitToken(token: string): Promise<void> {
    if (!this.hasOption(token)) {
      // the filter box only narrows the menu; unlisted tokens are never sent
      this.notice = `"${token}" is not among the proposed continuations`;
      this.emit();
      return;
    }
    await this.guarded(async () => {
      const response = await this.withSession((sid) => this.api.pushToken(sid, token));
      if (response.accepted) {
        this.tokens.push(token);
        this.trees = null;
        this.notice = "";
      } else {
        this.notice = `"${token}" was rejected; pick one of the proposed continuations`;
      }
      this.options = response.options;
      this.antecedents = response.antecedents;
      this.complete = response.complete;
    });
  }

  async undo(): Promise<void> {
    if (this.tokens.length === 0) return;
    await this.guarded(async () => {
      const response = await this.withSession((sid) => this.api.popToken(sid));
      this.tokens.pop();
      this.trees = null;
      this.notice = "";
      this.options = response.options;
      this.antecedents = response.antecedents;
      this.complete = response.complete;
    });
  }

  async showTree(): Promise<void> {
    if (!this.complete) return;
    await this.guarded(async () => {
      this.trees = await this.withSession((sid) => this.api.getTree(sid));
    });
  }
}
