public class Main {
  public static void main(String[] args) {
    int y = 3;
    y = y + 1;
  }
}
