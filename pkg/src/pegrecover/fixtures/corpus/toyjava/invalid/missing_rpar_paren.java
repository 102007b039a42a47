public class Main {
  public static void main(String[] args) {
    int l = (1 + 2 * 3;
  }
}
