import type {
  ApiErrorBody,
  InterchangeDoc,
  SchemaDoc,
  StoreEntryBody,
  ValidationResponse,
} from "./types.js";

export type FetchLike = (
  input: string,
  init?: RequestInit,
) => Promise<Response>;

/** The service answered with an error body ({code, message, span?}). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly body: ApiErrorBody,
  ) {
    super(`${body.code}: ${body.message}`);
    this.name = "ApiError";
  }
}

/** The service could not be reached at all (network level). */
export class ServiceUnreachable extends Error {
  constructor(cause: unknown) {
    super(`service unreachable: ${String(cause)}`);
    this.name = "ServiceUnreachable";
  }
}

const JSON_TYPE = "application/json; charset=utf-8";

export interface SaveOptions {
  ifMatch?: number;
  requirePublishable?: boolean;
}

export class ApiClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchImpl: FetchLike = (input, init) =>
      globalThis.fetch(input, init),
  ) {}

  private async request(path: string, init?: RequestInit): Promise<Response> {
    let response: Response;
    try {
      response = await this.fetchImpl(`${this.base}/api/v1${path}`, init);
    } catch (cause) {
      throw new ServiceUnreachable(cause);
    }
    if (!response.ok) {
      let body: ApiErrorBody;
      try {
        body = (await response.json()) as ApiErrorBody;
      } catch {
        body = { code: "unknown", message: response.statusText };
      }
      throw new ApiError(response.status, body);
    }
    return response;
  }

  async schema(): Promise<SchemaDoc> {
    const response = await this.request("/schema");
    return (await response.json()) as SchemaDoc;
  }

  async validate(doc: InterchangeDoc): Promise<ValidationResponse> {
    const response = await this.request("/validate", {
      method: "POST",
      headers: { "content-type": JSON_TYPE },
      body: JSON.stringify(doc),
    });
    return (await response.json()) as ValidationResponse;
  }

  async render(doc: InterchangeDoc, target: string): Promise<string> {
    const response = await this.request(
      `/render?target=${encodeURIComponent(target)}`,
      {
        method: "POST",
        headers: { "content-type": JSON_TYPE },
        body: JSON.stringify(doc),
      },
    );
    return response.text();
  }

  async load(id: string): Promise<StoreEntryBody> {
    const response = await this.request(`/factsheets/${id}`);
    return (await response.json()) as StoreEntryBody;
  }

  async save(
    id: string,
    doc: InterchangeDoc,
    options: SaveOptions = {},
  ): Promise<StoreEntryBody> {
    const headers: Record<string, string> = { "content-type": JSON_TYPE };
    if (options.ifMatch !== undefined) {
      headers["if-match"] = `"${options.ifMatch}"`;
    }
    const query = options.requirePublishable ? "?require=publishable" : "";
    const response = await this.request(`/factsheets/${id}${query}`, {
      method: "PUT",
      headers,
      body: JSON.stringify(doc),
    });
    return (await response.json()) as StoreEntryBody;
  }
}
