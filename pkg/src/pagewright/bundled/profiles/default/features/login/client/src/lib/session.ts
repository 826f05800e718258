import { ref } from "vue";

export interface SessionUser {
  id: number;
  email: string;
}

export const session = ref<SessionUser | null>(null);
